#include "kobayashi/geometry.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <sstream>
#include <vector>

#include "kobayashi/errors.hpp"

namespace kobayashi {

namespace {

constexpr int kNewtonMaxIter = 50;
constexpr double kNewtonTol = 1e-12;

void check_validity(const ComplexPoint& z, int dim) {
    if (z.size() != dim) throw DomainError("point dimension does not match the domain");
    if (!z.allFinite()) throw DomainError("point has non-finite coordinates");
    if (z.norm() > DomainSpec::kValidityRadius) throw DomainError("point outside the numerical validity region |z| <= 2");
}

struct Candidate {
    Eigen::VectorXd p;
    double dist = 0.0;
};

// Newton iteration on the Lagrange system p - z + lambda grad r(p) = 0, r(p) = 0.
std::optional<Candidate> lagrange_newton(const DomainSpec& domain, const Eigen::VectorXd& z,
                                         Eigen::VectorXd p) {
    const Eigen::Index n = p.size();
    Eigen::VectorXd g = domain.grad_real(p);
    double lambda = (z - p).dot(g) / g.squaredNorm();

    auto residual = [&](const Eigen::VectorXd& pp, double lam, Eigen::VectorXd& f) {
        f.resize(n + 1);
        f.head(n) = pp - z + lam * domain.grad_real(pp);
        f(n) = domain.r_real(pp);
    };

    Eigen::VectorXd f;
    residual(p, lambda, f);
    for (int it = 0; it < kNewtonMaxIter; ++it) {
        if (f.norm() < kNewtonTol) return Candidate{p, (z - p).norm()};
        g = domain.grad_real(p);
        Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n + 1, n + 1);
        jac.topLeftCorner(n, n) = Eigen::MatrixXd::Identity(n, n) + lambda * domain.hess_real(p);
        jac.topRightCorner(n, 1) = g;
        jac.bottomLeftCorner(1, n) = g.transpose();
        const Eigen::VectorXd step = jac.partialPivLu().solve(-f);
        if (!step.allFinite()) return std::nullopt;
        double scale = 1.0;
        Eigen::VectorXd f_new;
        for (int ls = 0; ls < 30; ++ls) {
            residual(p + scale * step.head(n), lambda + scale * step(n), f_new);
            if (f_new.norm() < f.norm() || f_new.norm() < kNewtonTol) break;
            scale *= 0.5;
        }
        p += scale * step.head(n);
        lambda += scale * step(n);
        f = f_new;
    }
    if (f.norm() < 1e3 * kNewtonTol) return Candidate{p, (z - p).norm()};
    return std::nullopt;
}

std::vector<Candidate> critical_points(const DomainSpec& domain, const ComplexPoint& z) {
    const Eigen::VectorXd x = to_real(z);
    const Eigen::Index n = x.size();
    const bool inside = domain.r_real(x) < 0.0;
    std::vector<Eigen::VectorXd> seeds;

    const ComplexPoint origin = ComplexPoint::Zero(z.size());
    if (z.norm() > 1e-14) seeds.push_back(to_real(ray_boundary(domain, origin, z)));
    if (inside) {
        for (Eigen::Index k = 0; k < n; ++k) {
            for (double s : {1.0, -1.0}) {
                Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
                e(k) = s;
                seeds.push_back(to_real(ray_boundary(domain, z, to_complex(e))));
            }
        }
        const Eigen::VectorXd g = domain.grad_real(x);
        if (g.norm() > 1e-14) seeds.push_back(to_real(ray_boundary(domain, z, to_complex(g))));
    } else if (z.norm() <= 1e-14) {
        throw NumericalFailure("nearest-point seeding failed");
    }

    std::vector<Candidate> out;
    for (auto& s : seeds)
        if (auto c = lagrange_newton(domain, x, s)) out.push_back(*c);
    if (out.empty()) throw NumericalFailure("nearest-point iteration did not converge");
    return out;
}

Candidate pick_nearest(const std::vector<Candidate>& cands, const ComplexPoint& z, bool check_ambiguity) {
    size_t best = 0;
    for (size_t i = 1; i < cands.size(); ++i)
        if (cands[i].dist < cands[best].dist) best = i;
    const double tol = 1e-9 * std::max(1.0, cands[best].dist);
    std::vector<size_t> ties;
    for (size_t i = 0; i < cands.size(); ++i)
        if (cands[i].dist - cands[best].dist < tol) ties.push_back(i);

    bool distinct = false;
    for (size_t i : ties)
        if ((cands[i].p - cands[best].p).norm() > 1e-6) distinct = true;
    if (!distinct || !check_ambiguity) return cands[best];

    if (z.norm() == 0.0) {
        // Symmetry center: prefer the first coordinate axis direction.
        size_t pick = ties.front();
        for (size_t i : ties)
            if (cands[i].p(0) > cands[pick].p(0) + 1e-12) pick = i;
        return cands[pick];
    }
    std::ostringstream msg;
    msg << "nearest boundary point is not unique (distance " << cands[best].dist << ")";
    throw AmbiguityError(msg.str());
}

}  // namespace

double ray_exit(const DomainSpec& domain, const ComplexPoint& origin, const ComplexVector& u) {
    const double c = domain.r(origin);
    if (!(c < 0.0)) throw DomainError("ray origin must lie inside the domain");
    if (domain.variant() != DomainVariant::PerturbedBall) {
        // r(origin + s u) = A s^2 + 2 B s + C
        double a = 0.0, b = 0.0;
        for (int j = 0; j < domain.dim(); ++j) {
            a += domain.axes()[j] * std::norm(u(j));
            b += domain.axes()[j] * (std::conj(origin(j)) * u(j)).real();
        }
        const double disc = std::sqrt(b * b - a * c);
        // Root of the quadratic written to avoid cancellation.
        return b >= 0.0 ? -c / (b + disc) : (disc - b) / a;
    }
    double lo = 0.0, hi = 0.5;
    while (domain.r(origin + hi * u) < 0.0) {
        lo = hi;
        hi *= 2.0;
        if (hi > 16.0) throw NumericalFailure("ray does not leave the domain");
    }
    // r is convex along the ray, so Newton from the outside point decreases monotonically to the root.
    const Eigen::VectorXd ur = to_real(u);
    double s = hi;
    for (int it = 0; it < 60; ++it) {
        const ComplexPoint p = origin + s * u;
        const Eigen::VectorXd pr = to_real(p);
        const double rv = domain.r_real(pr);
        if (rv <= 0.0) return s;
        const double slope = domain.grad_real(pr).dot(ur);
        const double next = s - rv / slope;
        if (!(slope > 0.0) || !(next >= lo) || !(next < s)) break;
        if (s - next <= 1e-15 * s) return next;
        s = next;
    }
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (domain.r(origin + mid * u) < 0.0) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

ComplexPoint ray_boundary(const DomainSpec& domain, const ComplexPoint& origin, const ComplexVector& dir) {
    const double len = dir.norm();
    if (!(len > 0.0)) throw DegenerateInput("ray direction must be nonzero");
    const ComplexVector u = dir / len;
    return origin + ray_exit(domain, origin, u) * u;
}

double signed_distance(const DomainSpec& domain, const ComplexPoint& z) {
    check_validity(z, domain.dim());
    const double rz = domain.r(z);
    if (rz == 0.0) return 0.0;
    const auto cands = critical_points(domain, z);
    const double d = pick_nearest(cands, z, false).dist;
    return rz < 0.0 ? -d : d;
}

double boundary_distance(const DomainSpec& domain, const ComplexPoint& z) {
    const double s = signed_distance(domain, z);
    if (!(s < 0.0)) throw DomainError("point is not inside the domain");
    return -s;
}

BoundaryFrame boundary_frame(const DomainSpec& domain, const ComplexPoint& z) {
    check_validity(z, domain.dim());
    const double rz = domain.r(z);
    BoundaryFrame f;
    f.base = z;
    Eigen::VectorXd p;
    if (rz == 0.0) {
        p = to_real(z);
        f.sdist = 0.0;
    } else {
        const auto c = pick_nearest(critical_points(domain, z), z, true);
        p = c.p;
        f.sdist = rz < 0.0 ? -c.dist : c.dist;
    }
    f.nearest = to_complex(p);
    const Eigen::VectorXd g = domain.grad_real(p);
    f.nu = to_complex(g / g.norm());
    f.gbar = 0.5 * f.nu;
    return f;
}

NormalSplit normal_split(const BoundaryFrame& frame, const ComplexVector& x) {
    if (x.size() != frame.nu.size()) throw DomainError("vector dimension does not match the frame");
    NormalSplit s;
    const cplx proj = hermitian(x, frame.gbar);
    s.normal = (2.0 * proj) * frame.nu;
    s.tangential = x - s.normal;
    s.xN_abs = 2.0 * std::abs(proj);
    s.xn_abs = 2.0 * std::abs(proj.real());
    return s;
}

double h_product(const DomainSpec& domain, const ComplexPoint& z, const ComplexPoint& w) {
    return std::sqrt(boundary_distance(domain, z) * boundary_distance(domain, w));
}

double levi_audit(const DomainSpec& domain, const ComplexPoint& p, const ComplexVector& v) {
    if (std::abs(domain.r(p)) > 1e-8) throw PreconditionError("levi_audit: point is not on the boundary");
    const ComplexVector dr = domain.dr(p);
    cplx tang = 0.0;
    for (Eigen::Index j = 0; j < v.size(); ++j) tang += dr(j) * v(j);
    if (std::abs(tang) > 1e-8 * std::max(1.0, v.norm()) * std::max(1.0, dr.norm()))
        throw PreconditionError("levi_audit: vector is not complex tangent");
    const Eigen::MatrixXcd l = domain.levi_matrix(p);
    cplx form = 0.0;
    for (Eigen::Index j = 0; j < v.size(); ++j)
        for (Eigen::Index k = 0; k < v.size(); ++k) form += l(j, k) * v(j) * std::conj(v(k));
    return form.real();
}

ConvexityReport convexity_audit(const DomainSpec& domain, int n_samples, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const int d = domain.dim();
    ConvexityReport rep;
    rep.min_real_hessian_eig = std::numeric_limits<double>::infinity();
    rep.min_levi_eig = std::numeric_limits<double>::infinity();
    double worst = std::numeric_limits<double>::infinity();
    const ComplexPoint origin = ComplexPoint::Zero(d);

    auto random_dir = [&] {
        Eigen::VectorXd x(2 * d);
        for (int i = 0; i < 2 * d; ++i) x(i) = normal(rng);
        return to_complex(x / x.norm());
    };
    auto note = [&](double eig, const ComplexPoint& at) {
        if (eig < worst) {
            worst = eig;
            rep.witness = at;
        }
    };

    for (int s = 0; s < n_samples; ++s) {
        const ComplexPoint p = ray_boundary(domain, origin, random_dir());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(domain.hess_real(to_real(p)));
        const double hmin = es.eigenvalues().minCoeff();
        rep.min_real_hessian_eig = std::min(rep.min_real_hessian_eig, hmin);
        note(hmin, p);

        if (d > 1) {
            // Orthonormal basis of the complex tangent space {V : sum r_j V_j = 0}.
            const ComplexVector n = domain.dr(p).conjugate().normalized();
            const Eigen::MatrixXcd nm = n;
            Eigen::HouseholderQR<Eigen::MatrixXcd> qr(nm);
            const Eigen::MatrixXcd q = qr.householderQ() * Eigen::MatrixXcd::Identity(d, d);
            const Eigen::MatrixXcd t = q.rightCols(d - 1);
            const Eigen::MatrixXcd m = t.transpose() * domain.levi_matrix(p) * t.conjugate();
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> ls(0.5 * (m + m.adjoint()));
            const double lmin = ls.eigenvalues().minCoeff();
            rep.min_levi_eig = std::min(rep.min_levi_eig, lmin);
            note(lmin, p);
        }
        ++rep.samples;
    }
    if (domain.variant() == DomainVariant::PerturbedBall) {
        for (int s = 0; s < n_samples; ++s) {
            const ComplexPoint x = random_dir() * (1.2 * std::pow(unif(rng), 1.0 / (2 * d)));
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(domain.hess_real(to_real(x)));
            const double hmin = es.eigenvalues().minCoeff();
            rep.min_real_hessian_eig = std::min(rep.min_real_hessian_eig, hmin);
            note(hmin, x);
        }
    }
    if (d == 1) rep.min_levi_eig = rep.min_real_hessian_eig / 2.0;
    if (n_samples > 0 && !(worst > 0.0)) {
        std::ostringstream msg;
        msg << "convexity audit failed: minimum eigenvalue " << worst << " at witness (";
        for (int j = 0; j < d; ++j) msg << (j ? ", " : "") << rep.witness(j);
        msg << ")";
        throw InvalidDomain(msg.str());
    }
    return rep;
}

}  // namespace kobayashi
