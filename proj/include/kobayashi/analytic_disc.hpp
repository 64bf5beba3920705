#pragma once

#include <Eigen/Dense>

#include "json.hpp"
#include "kobayashi/disc.hpp"
#include "kobayashi/domain.hpp"

namespace kobayashi {

/// Polynomial analytic disc, optionally precomposed with a disc automorphism.
///
/// phi(zeta) = P(tau(zeta)) with P(s) = sum_k c_k s^k and
/// tau(zeta) = mobius(pre_center, pre_rotation * zeta). With the identity
/// reparametrization (pre_center = 0, pre_rotation = 1), c_0 = phi(0).
/// The image phi(Delta) equals P(Delta), so image quantities (diameter,
/// boundary samples) are computed from P directly.
struct AnalyticDisc {
    Eigen::MatrixXcd coeffs;  ///< (K+1) x d, row k holds c_k
    cplx pre_center = 0.0;
    cplx pre_rotation = 1.0;

    AnalyticDisc() = default;
    explicit AnalyticDisc(Eigen::MatrixXcd c) : coeffs(std::move(c)) {}

    int degree() const { return static_cast<int>(coeffs.rows()) - 1; }
    int dim() const { return static_cast<int>(coeffs.cols()); }
    bool has_reparam() const { return pre_center != cplx(0.0) || pre_rotation != cplx(1.0); }

    /// P(s) and P'(s) in the polynomial parameter.
    ComplexPoint poly(cplx s) const;
    ComplexVector poly_derivative(cplx s) const;

    cplx reparam(cplx zeta) const;
    /// Inverse of the reparametrization: polynomial parameter -> disc parameter.
    cplx reparam_inverse(cplx s) const;

    ComplexPoint operator()(cplx zeta) const { return poly(reparam(zeta)); }
    ComplexVector derivative(cplx zeta) const;

    /// Samples P on the M-th roots of unity.
    std::vector<ComplexPoint> boundary_samples(int m) const;

    nlohmann::json to_json() const;
    static AnalyticDisc from_json(const nlohmann::json& j);

    static AnalyticDisc affine(const ComplexPoint& center, const ComplexVector& direction);
};

/// [re, im] pair encoding used by every JSON output.
nlohmann::json complex_json(cplx z);
nlohmann::json vector_json(const ComplexVector& v);
ComplexVector vector_from_json(const nlohmann::json& j);

}  // namespace kobayashi
