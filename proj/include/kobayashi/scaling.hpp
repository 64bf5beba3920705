#pragma once

#include <functional>
#include <string>
#include <vector>

#include "json.hpp"
#include "kobayashi/analytic_disc.hpp"
#include "kobayashi/domain.hpp"
#include "kobayashi/errors.hpp"

namespace kobayashi {

/// The touching parameter hit t = 1 (the disc reaches Re z_1 = 0 only at the limit).
class BoundaryCase : public PreconditionError {
public:
    using PreconditionError::PreconditionError;
};

/// Holomorphic change of coordinates putting a boundary point in normal form.
///
/// For a query point z with nearest boundary point p the normal coordinates are
///     w = U (z - p),  u = Lambda w,  v = (u_1 + P(u), u'),  zhat = v + e_1,
/// where the first row of U is dr(p)/|dr(p)|, the other rows diagonalise the
/// Levi form on the complex tangent space (descending eigenvalues), Lambda
/// makes the Levi form the identity and P(u) = u^T S u removes the pure
/// holomorphic quadratic part. The normal-form defining function is
///     rhat(zhat) = exp(-2 Re <u, conj c>) r(z) / |dr(p)|,
/// whose Taylor expansion at e_1 is 2 Re v_1 + |v|^2 + O(|v|^3).
struct NormalizationMap {
    DomainSpec domain;
    ComplexPoint base;                 ///< query point z
    ComplexVector translation;         ///< p(z)
    Eigen::MatrixXcd unitary;          ///< U
    Eigen::VectorXd dilation;          ///< Lambda, dilation(0) = 1
    double gradient_norm = 1.0;        ///< |dr(p)|
    ComplexVector multiplier;          ///< c
    Eigen::MatrixXcd shear;            ///< symmetric S, P(u) = u^T S u
    double depth = 0.0;                ///< s = delta_D(z)
    std::vector<std::string> order{"translate", "unitary", "dilate", "shear", "translate_e1"};

    int dim() const { return static_cast<int>(base.size()); }
    cplx shear_poly(const ComplexVector& u) const;
    ComplexPoint to_normal(const ComplexPoint& z) const;
    ComplexPoint from_normal(const ComplexPoint& zhat) const;
    /// Normal-form defining function rhat.
    double defining(const ComplexPoint& zhat) const;

    nlohmann::json to_json() const;
};

struct ScalingParams {
    double t = 0.0;
    cplx eta_touch = 1.0;  ///< disc parameter on the unit circle where the transported disc touches
    cplx gamma = 0.0;      ///< z maps to (1 - s + gamma s^2, 0') in normal coordinates
    double rho_star = 0.0;

    nlohmann::json to_json() const;
};

struct NormalizedBoundary {
    NormalizationMap map;
    ScalingParams params;  ///< gamma only
};

/// Normal form at the boundary point nearest to z. Requires delta_D(z) < 0.2.
/// Throws InvalidDomain for a non-positive Levi eigenvalue and NumericalFailure
/// when the postcondition (gradient (2, 0, ...), identity Levi form, vanishing
/// holomorphic Hessian at e_1, to 1e-8) fails.
NormalizedBoundary normalize_boundary(const DomainSpec& domain, const ComplexPoint& z);

/// Taylor data of a defining function at a point from finite differences:
/// holomorphic gradient, Levi matrix and holomorphic Hessian.
struct LocalForm {
    ComplexVector dr;
    Eigen::MatrixXcd levi;
    Eigen::MatrixXcd holo;
};
LocalForm local_form(const std::function<double(const ComplexPoint&)>& r, const ComplexPoint& at, double h = 1e-3);

/// m_t(lambda) = (lambda + t) / (1 + t lambda), t in [0, 1).
cplx mobius_mt(double t, cplx lambda);

/// A_t(z) = (m_t(z_1), sqrt(1 - t^2) z' / (1 + t z_1)).
ComplexPoint cayley_At(double t, const ComplexPoint& z);
ComplexPoint cayley_At_inverse(double t, const ComplexPoint& u);

/// r_t(z) = |1 + t z_1|^2 / (1 - t^2) r(A_t z), defined on Re z_1 > -1/2.
double scaled_defining_rt(const std::function<double(const ComplexPoint&)>& r, double t, const ComplexPoint& z);
double scaled_defining_rt(const DomainSpec& domain, double t, const ComplexPoint& z);
double scaled_defining_rt(const NormalizationMap& map, double t, const ComplexPoint& z);

/// Smallest t in (0, 1) for which A_t^{-1} o phi touches {Re z_1 = 0}:
/// t / (1 + t^2) = rho* = min Re phi_1 / (1 + |phi_1|^2) over M boundary samples.
ScalingParams choose_t(const AnalyticDisc& disc, int m);

/// The disc F o phi in normal coordinates. F o P is a polynomial of degree 2K
/// (the shear is quadratic), recovered exactly from 4K + 4 samples; the
/// reparametrization of phi is kept.
AnalyticDisc normalize_disc(const NormalizationMap& map, const AnalyticDisc& disc);

struct TransportedDisc {
    AnalyticDisc disc;
    double residual = 0.0;  ///< max refit error at the sample points
};
/// Least-squares refit of s -> A_t^{-1}(P(s)) on M samples of the polynomial parameter by a
/// polynomial of degree k_out. The reparametrization of the input disc is kept.
TransportedDisc transport_disc(double t, const AnalyticDisc& disc, int m, int k_out);

struct TangentialRatio {
    double ratio = 0.0;
    double sqrt_factor = 0.0;  ///< sqrt(1 - t^2)
};
/// sqrt(1 - t^2) |x_1 - y_1| / |(1 + t x_1) y_T|, y_T = (0, y_2, ..., y_d).
TangentialRatio tangential_ratio(double t, const ComplexPoint& x, const ComplexPoint& y);

}  // namespace kobayashi
