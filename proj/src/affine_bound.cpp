// Affine-disc upper bounds for the Lempert function and the Kobayashi metric.
//
// Every affine disc through z lies in the complex line z + C u. Its image is a
// round disc {z + (c + rho s) u : |s| < 1} which sits in D iff rho is at most
// the inscribed radius of the planar slice around the center c.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

#include "kobayashi/disc.hpp"
#include "kobayashi/errors.hpp"
#include "kobayashi/geometry.hpp"
#include "kobayashi/lempert.hpp"

namespace kobayashi {

namespace {

constexpr int kRadiusSamples = 128;
constexpr double kInf = std::numeric_limits<double>::infinity();

/// Largest rho such that the circle {q + rho e^{i theta} u} stays in the closed domain.
double inscribed_radius(const DomainSpec& domain, const ComplexPoint& q, const ComplexVector& u) {
    if (!(domain.r(q) < 0.0)) return 0.0;
    auto extent = [&](double theta) { return ray_exit(domain, q, std::polar(1.0, theta) * u); };
    double best = kInf;
    int arg = 0;
    for (int j = 0; j < kRadiusSamples; ++j) {
        const double e = extent(2.0 * std::numbers::pi * j / kRadiusSamples);
        if (e < best) {
            best = e;
            arg = j;
        }
    }
    // Golden-section refinement around the coarse minimiser.
    const double h = 2.0 * std::numbers::pi / kRadiusSamples;
    double lo = h * (arg - 1), hi = h * (arg + 1);
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
    double f1 = extent(x1), f2 = extent(x2);
    for (int it = 0; it < 36; ++it) {
        if (f1 < f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = extent(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = extent(x2);
        }
    }
    return std::min({best, f1, f2});
}

struct Simplex2 {
    cplx x;
    double f;
};

/// Nelder-Mead minimisation over the complex plane.
cplx nelder_mead(const std::function<double(cplx)>& f, cplx start, double step, double xtol) {
    std::array<Simplex2, 3> s{{{start, f(start)}, {start + step, 0.0}, {start + cplx(0.0, step), 0.0}}};
    s[1].f = f(s[1].x);
    s[2].f = f(s[2].x);
    for (int it = 0; it < 2000; ++it) {
        std::sort(s.begin(), s.end(), [](const Simplex2& a, const Simplex2& b) { return a.f < b.f; });
        const double size = std::max(std::abs(s[1].x - s[0].x), std::abs(s[2].x - s[0].x));
        if (size < xtol) break;
        const cplx centroid = 0.5 * (s[0].x + s[1].x);
        const cplx xr = centroid + (centroid - s[2].x);
        const double fr = f(xr);
        if (fr < s[0].f) {
            const cplx xe = centroid + 2.0 * (centroid - s[2].x);
            const double fe = f(xe);
            s[2] = fe < fr ? Simplex2{xe, fe} : Simplex2{xr, fr};
        } else if (fr < s[1].f) {
            s[2] = {xr, fr};
        } else {
            const cplx xc = centroid + 0.5 * (s[2].x - centroid);
            const double fc = f(xc);
            if (fc < s[2].f) {
                s[2] = {xc, fc};
            } else {
                for (int k = 1; k < 3; ++k) {
                    s[k].x = s[0].x + 0.5 * (s[k].x - s[0].x);
                    s[k].f = f(s[k].x);
                }
            }
        }
    }
    std::sort(s.begin(), s.end(), [](const Simplex2& a, const Simplex2& b) { return a.f < b.f; });
    return s[0].x;
}

AffineBound make_bound(const ComplexPoint& z, const ComplexVector& u, cplx c, double rho, double value) {
    AffineBound b;
    b.value = value;
    b.disc = AnalyticDisc::affine(z + c * u, rho * u);
    b.zeta_z = -c / rho;
    return b;
}

}  // namespace

AnalyticDisc affine_seed_disc(const DomainSpec& domain, const ComplexPoint& z, const ComplexPoint& w) {
    const double len = (w - z).norm();
    if (len == 0.0) throw DegenerateInput("affine seed needs z != w");
    if (!(domain.r(z) < 0.0) || !(domain.r(w) < 0.0)) throw DomainError("seed points must lie inside the domain");
    const ComplexVector u = (w - z) / len;
    const double rho = inscribed_radius(domain, z, u);
    if (!(len < rho)) throw PreconditionError("seed failure: w lies outside the inscribed disc around z");
    return AnalyticDisc::affine(z, rho * u);
}

AffineBound affine_pair_bound(const DomainSpec& domain, const ComplexPoint& z, const ComplexPoint& w) {
    const double len = (w - z).norm();
    if (len == 0.0) throw DegenerateInput("affine bound needs z != w");
    if (!(domain.r(z) < 0.0) || !(domain.r(w) < 0.0)) throw DomainError("points must lie inside the domain");
    const ComplexVector u = (w - z) / len;
    auto radius = [&](cplx c) { return inscribed_radius(domain, z + c * u, u); };
    auto objective = [&](cplx c) {
        const double rho = radius(c);
        if (!(rho > std::abs(c)) || !(rho > std::abs(len - c))) return kInf;
        return disc_distance(-c / rho, (len - c) / rho);
    };

    AffineBound best;
    best.value = kInf;
    // Disc centred at z.
    const double rho0 = radius(0.0);
    if (len < rho0) {
        best = make_bound(z, u, 0.0, rho0, disc_distance(0.0, len / rho0));
        best.zeta_w = len / rho0;
    }
    // Deepest point of the slice, then the best centre for this pair.
    const cplx deep = nelder_mead([&](cplx c) { return -radius(c); }, 0.5 * len, 0.25 * std::max(len, rho0), 1e-6);
    const cplx start = objective(deep) <= objective(0.5 * len) ? deep : cplx(0.5 * len);
    const double step = 0.1 * std::max(radius(start), 1e-6);
    const cplx c = nelder_mead(objective, start, step, 1e-13);
    const double val = objective(c);
    if (val < best.value) {
        const double rho = radius(c);
        best = make_bound(z, u, c, rho, val);
        best.zeta_w = (len - c) / rho;
    }
    if (!std::isfinite(best.value)) throw NumericalFailure("no affine disc contains both points");
    return best;
}

AffineBound affine_metric_bound(const DomainSpec& domain, const ComplexPoint& z, const ComplexVector& x) {
    const double len = x.norm();
    if (len == 0.0) throw DegenerateInput("metric needs a nonzero vector");
    if (!(domain.r(z) < 0.0)) throw DomainError("point must lie inside the domain");
    const ComplexVector u = x / len;
    auto radius = [&](cplx c) { return inscribed_radius(domain, z + c * u, u); };
    // kappa = |X| rho / (rho^2 - |c|^2) for the disc c + rho s with z at s = -c / rho.
    auto objective = [&](cplx c) {
        const double rho = radius(c);
        const double gap = rho * rho - std::norm(c);
        return gap > 0.0 ? len * rho / gap : kInf;
    };
    const double rho0 = radius(0.0);
    const cplx c = nelder_mead(objective, 0.0, 0.1 * rho0, 1e-13);
    const double v0 = objective(0.0), v = objective(c);
    if (v0 <= v) return make_bound(z, u, 0.0, rho0, v0);
    return make_bound(z, u, c, radius(c), v);
}

}  // namespace kobayashi
