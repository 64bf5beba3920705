#include "kobayashi/disc.hpp"

#include <cmath>

#include "kobayashi/errors.hpp"

namespace kobayashi {

namespace {

constexpr double kClamp = 1.0 - 1e-15;

void require_in_disc(cplx z) {
    if (!(std::abs(z) < 1.0)) throw DomainError("point is not in the open unit disc");
}

double one_minus_abs2(cplx z) {
    const double a = std::abs(z);
    return (1.0 - a) * (1.0 + a);
}

}  // namespace

double atanh_stable(double t, double one_minus_t2) {
    if (!(t >= 0.0)) throw DomainError("atanh argument must be non-negative");
    if (t >= 1.0 || one_minus_t2 <= 0.0) {
        if (t > 1.0) throw DomainError("atanh argument exceeds 1");
        t = kClamp;
        one_minus_t2 = (1.0 - t) * (1.0 + t);
    }
    if (t > kClamp) {
        t = kClamp;
        one_minus_t2 = std::max(one_minus_t2, (1.0 - t) * (1.0 + t));
    }
    if (t < 0.5) return std::atanh(t);
    return std::log1p(t) - 0.5 * std::log(one_minus_t2);
}

double pseudo_hyperbolic(cplx zeta, cplx eta) {
    require_in_disc(zeta);
    require_in_disc(eta);
    return std::abs(zeta - eta) / std::abs(1.0 - std::conj(zeta) * eta);
}

double disc_distance(cplx zeta, cplx eta) {
    require_in_disc(zeta);
    require_in_disc(eta);
    const double den = std::norm(1.0 - std::conj(zeta) * eta);
    const double t = std::sqrt(std::norm(zeta - eta) / den);
    const double one_minus_t2 = one_minus_abs2(zeta) * one_minus_abs2(eta) / den;
    return atanh_stable(std::min(t, 1.0), one_minus_t2);
}

double disc_metric(cplx zeta, cplx x) {
    require_in_disc(zeta);
    return std::abs(x) / one_minus_abs2(zeta);
}

double disc_boundary_dist(cplx zeta) {
    require_in_disc(zeta);
    return 1.0 - std::abs(zeta);
}

double halfplane_distance(cplx a, cplx b) {
    if (!(a.real() < 0.0) || !(b.real() < 0.0))
        throw DomainError("half-plane points must have negative real part");
    const double den = std::norm(a + std::conj(b));
    const double t = std::sqrt(std::norm(a - b) / den);
    const double one_minus_t2 = 4.0 * a.real() * b.real() / den;
    return atanh_stable(std::min(t, 1.0), one_minus_t2);
}

double disc_lower_bound(cplx zeta, cplx eta) {
    const double h = std::sqrt(disc_boundary_dist(zeta) * disc_boundary_dist(eta));
    return std::log1p(std::abs(zeta - eta) / (2.0 * h));
}

cplx mobius(cplx a, cplx zeta) { return (zeta + a) / (1.0 + std::conj(a) * zeta); }

cplx mobius_derivative(cplx a, cplx zeta) {
    const cplx den = 1.0 + std::conj(a) * zeta;
    return (1.0 - std::norm(a)) / (den * den);
}

}  // namespace kobayashi
