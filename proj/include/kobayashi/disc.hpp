#pragma once

#include <complex>

namespace kobayashi {

using cplx = std::complex<double>;

/// tanh^{-1} t computed from t and 1 - t^2 as log(1 + t) - log(1 - t^2) / 2.
/// Passing 1 - t^2 separately keeps precision near t = 1. Throws DomainError
/// when t >= 1 beyond the clamp 1 - 1e-15.
double atanh_stable(double t, double one_minus_t2);

/// Poincare distance on the unit disc.
double disc_distance(cplx zeta, cplx eta);

/// Pseudo-hyperbolic distance |(zeta - eta) / (1 - conj(zeta) eta)|.
double pseudo_hyperbolic(cplx zeta, cplx eta);

/// Infinitesimal Poincare metric |X| / (1 - |zeta|^2).
double disc_metric(cplx zeta, cplx x);

/// delta_Delta(zeta) = 1 - |zeta|.
double disc_boundary_dist(cplx zeta);

/// Poincare distance of the left half-plane {Re < 0}.
double halfplane_distance(cplx a, cplx b);

/// log(1 + |zeta - eta| / (2 sqrt(delta(zeta) delta(eta)))), a lower bound for disc_distance.
double disc_lower_bound(cplx zeta, cplx eta);

/// Disc automorphism zeta -> (zeta + a) / (1 + conj(a) zeta), |a| < 1.
cplx mobius(cplx a, cplx zeta);
/// Derivative of mobius(a, .) at zeta.
cplx mobius_derivative(cplx a, cplx zeta);

}  // namespace kobayashi
