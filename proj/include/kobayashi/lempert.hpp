#pragma once

#include <vector>

#include "json.hpp"
#include "kobayashi/analytic_disc.hpp"
#include "kobayashi/domain.hpp"

namespace kobayashi {

/// Settings of the extremal-disc solver.
///
/// The disc P has Taylor degree `degree`; the constraint r(P) <= 0 is imposed
/// on `grid` roots of unity through a logarithmic barrier whose weight runs
/// geometrically from `barrier_start` down to `barrier_end`.
struct SolverConfig {
    int degree = 16;
    int grid = 128;
    double barrier_start = 1e-2;
    double barrier_end = 1e-10;
    double barrier_factor = 0.1;
    double tol = 1e-10;  ///< Newton decrement threshold per barrier stage
    int max_iter = 500;  ///< Newton iterations per barrier stage
    double fd_step = 1e-7;
    double residual_threshold = 5e-2;
    /// Compute the geodesic residual of pair solves; converged then also requires
    /// residual < residual_threshold.
    bool certify = false;

    void validate() const;
    /// Settings used for the inner solves of geodesic certification.
    SolverConfig reduced() const;
    nlohmann::json to_json() const;
};

struct GeodesicResult {
    AnalyticDisc disc;          ///< disc(0) = z and disc(alpha) = w, or alpha disc'(0) = X
    double alpha = 0.0;         ///< pair problem parameter, value = atanh(alpha)
    double lambda = 0.0;        ///< infinitesimal problem, value = kappa_D(z; X)
    double value = 0.0;
    double residual = 0.0;      ///< geodesic certification, NaN when not computed
    double diam = 0.0;
    bool converged = false;
    bool degenerate_pair = false;
    bool from_seed = false;     ///< the affine seed beat the refined disc
    double seed_value = 0.0;    ///< affine upper bound for the same problem
    double max_boundary_r = 0.0;  ///< max of r on an 8x refined boundary grid
    cplx zeta_z = 0.0;          ///< polynomial parameter of z
    cplx zeta_w = 0.0;          ///< polynomial parameter of w (pair problem)
    std::vector<double> stage_values;  ///< objective at the end of each barrier stage
    int iterations = 0;

    nlohmann::json to_json() const;
};

/// Affine disc z + zeta (w - z) / tau, tau the largest inscribed radius around z
/// along the complex line. Throws if w is not inside that disc.
AnalyticDisc affine_seed_disc(const DomainSpec& domain, const ComplexPoint& z, const ComplexPoint& w);

/// Lempert-function upper bound over affine discs in the complex line through z, w:
/// the best of the disc centred at z and the disc centred to minimise the
/// Poincare distance between the preimages of z and w.
struct AffineBound {
    double value = 0.0;
    AnalyticDisc disc;  ///< polynomial form c + rho s u
    cplx zeta_z = 0.0, zeta_w = 0.0;
};
AffineBound affine_pair_bound(const DomainSpec& domain, const ComplexPoint& z, const ComplexPoint& w);
AffineBound affine_metric_bound(const DomainSpec& domain, const ComplexPoint& z, const ComplexVector& x);

GeodesicResult solve_extremal_pair(const DomainSpec& domain, const ComplexPoint& z, const ComplexPoint& w,
                                   const SolverConfig& cfg = {});

GeodesicResult solve_extremal_dir(const DomainSpec& domain, const ComplexPoint& z, const ComplexVector& x,
                                  const SolverConfig& cfg = {});

/// Largest deviation of the analytic barrier gradient and Hessian from central
/// differences with step cfg.fd_step, at the seed of the pair problem perturbed
/// by `jitter` in every coordinate.
struct DerivativeCheck {
    double grad_err = 0.0, hess_err = 0.0;  ///< relative to the largest entry
};
DerivativeCheck barrier_derivative_check(const DomainSpec& domain, const ComplexPoint& z, const ComplexPoint& w,
                                         const SolverConfig& cfg, double mu, double jitter);

/// Max pairwise distance of the disc image over m boundary samples.
double disc_diameter(const AnalyticDisc& disc, int m);

/// Interior grid of the disc parameter: 4 radii up to 0.9, 8 angles.
std::vector<cplx> interior_grid(int n_points = 32, double max_radius = 0.9);

/// max |k_D(phi(zeta), phi(eta)) - k_Delta(zeta, eta)| / k_Delta(zeta, eta) over
/// pairs of the interior grid, with k_D from solve_extremal_pair at reduced settings.
/// `n_pairs` caps the number of pairs (at most the grid size).
double geodesic_residual(const DomainSpec& domain, const AnalyticDisc& disc, const SolverConfig& cfg,
                         int n_pairs = 32);

/// Range of kappa_D(P(s); P'(s)) (1 - |s|^2) over the interior grid of the polynomial
/// parameter, kappa_D from solve_extremal_dir at reduced settings.
struct PullbackRatio {
    double min = 0.0, max = 0.0;
};
PullbackRatio pullback_metric_ratio(const DomainSpec& domain, const AnalyticDisc& disc, const SolverConfig& cfg,
                                    int n_points = 32);

struct Sandwich {
    double lower = 0.0, upper = 0.0;
};
/// Poincare distance of the images of z and w in the half-plane cut out by the
/// supporting hyperplane at the nearest boundary point of z, and of w; the
/// larger of the two. A lower bound for k_D(z, w) on convex domains.
double halfplane_lower_bound(const DomainSpec& domain, const ComplexPoint& z, const ComplexPoint& w);

/// Supporting half-plane lower bound and affine-disc upper bound for k_D(z, w).
Sandwich distance_sandwich(const DomainSpec& domain, const ComplexPoint& z, const ComplexPoint& w);

}  // namespace kobayashi
