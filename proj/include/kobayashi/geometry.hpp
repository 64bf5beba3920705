#pragma once

#include <cstdint>

#include "kobayashi/domain.hpp"

namespace kobayashi {

/// Nearest boundary point data at a query point.
struct BoundaryFrame {
    ComplexPoint base;     ///< query point z
    ComplexPoint nearest;  ///< p(z) on {r = 0}
    double sdist = 0.0;    ///< signed distance, negative inside
    ComplexVector gbar;    ///< dbar of the signed distance at p(z); |gbar| = 1/2
    ComplexVector nu;      ///< outward unit normal at p(z), as a complex vector
};

struct NormalSplit {
    ComplexVector normal;      ///< X_N, projection on the complex normal line
    ComplexVector tangential;  ///< X_T = X - X_N
    double xn_abs = 0.0;       ///< |X_n| = 2 |Re <X, gbar>|, the real normal part
    double xN_abs = 0.0;       ///< |X_N| = 2 |<X, gbar>|
};

/// Signed distance to the boundary (negative inside).
double signed_distance(const DomainSpec& domain, const ComplexPoint& z);

/// Positive interior distance delta_D(z); throws DomainError when z is not inside.
double boundary_distance(const DomainSpec& domain, const ComplexPoint& z);

BoundaryFrame boundary_frame(const DomainSpec& domain, const ComplexPoint& z);

NormalSplit normal_split(const BoundaryFrame& frame, const ComplexVector& x);

/// h_D(z, w) = sqrt(delta_D(z) delta_D(w)).
double h_product(const DomainSpec& domain, const ComplexPoint& z, const ComplexPoint& w);

/// Levi form sum_jk r_{j kbar}(p) V_j conj(V_k) at a boundary point, V complex tangent.
double levi_audit(const DomainSpec& domain, const ComplexPoint& p, const ComplexVector& v);

struct ConvexityReport {
    double min_real_hessian_eig = 0.0;
    double min_levi_eig = 0.0;
    ComplexPoint witness;  ///< point attaining the smaller of the two minima
    int samples = 0;
};

/// Samples boundary points (and, for perturbed balls, the closed ball of
/// radius 1.2) and checks positive definiteness of the real Hessian of r and
/// the Levi form. Throws InvalidDomain naming the witness if any minimum <= 0.
ConvexityReport convexity_audit(const DomainSpec& domain, int n_samples, std::uint64_t seed);

/// Distance s > 0 at which origin + s * unit_dir meets the boundary (origin inside).
double ray_exit(const DomainSpec& domain, const ComplexPoint& origin, const ComplexVector& unit_dir);

/// Boundary point on the ray from `origin` in direction `dir` (origin inside).
ComplexPoint ray_boundary(const DomainSpec& domain, const ComplexPoint& origin, const ComplexVector& dir);

}  // namespace kobayashi
