#pragma once

#include <array>
#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"

namespace kobayashi {

using cplx = std::complex<double>;

/// A point of C^d.
using ComplexPoint = Eigen::VectorXcd;
/// A tangent vector of C^d.
using ComplexVector = Eigen::VectorXcd;

/// Real coordinates (x1, y1, ..., xd, yd) of a complex vector.
Eigen::VectorXd to_real(const ComplexVector& z);
ComplexVector to_complex(const Eigen::VectorXd& x);

/// Hermitian product <u, v> = sum u_j conj(v_j).
cplx hermitian(const ComplexVector& u, const ComplexVector& v);

/// One monomial of a real polynomial in (x1, y1, ..., xd, yd).
struct Monomial {
    std::vector<int> exponents;  // length 2d
    double coefficient = 0.0;
};

/// Real polynomial in the real coordinates of C^d, total degree at most 4.
class RealPolynomial {
public:
    RealPolynomial() = default;
    RealPolynomial(int dim, std::vector<Monomial> terms);

    int dim() const { return dim_; }
    int degree() const;
    const std::vector<Monomial>& terms() const { return terms_; }

    double value(const Eigen::VectorXd& x) const;
    Eigen::VectorXd gradient(const Eigen::VectorXd& x) const;
    Eigen::MatrixXd hessian(const Eigen::VectorXd& x) const;

    /// Parses a key such as "x1^2*y2" (or "1" for the constant) into exponents.
    static std::vector<int> parse_key(const std::string& key, int dim);
    static std::string format_key(const std::vector<int>& exponents);

private:
    int dim_ = 0;
    std::vector<Monomial> terms_;
};

/// Default perturbation x1^4 + x2^2 y2^2 + x1 y2^2 / 2 (first two coordinates; d >= 2).
RealPolynomial reference_perturbation(int dim);

enum class DomainVariant { Ball, Ellipsoid, PerturbedBall };

/// Bounded convex model domain {r < 0}.
///
/// Ball: r = |z|^2 - 1.  Ellipsoid: r = sum a_j |z_j|^2 - 1.
/// PerturbedBall: r = |z|^2 - 1 + eta * q(Re z, Im z).
class DomainSpec {
public:
    static DomainSpec ball(int dim);
    static DomainSpec ellipsoid(std::vector<double> a);
    static DomainSpec perturbed_ball(int dim, double eta, RealPolynomial q);

    static DomainSpec from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;

    DomainVariant variant() const { return variant_; }
    int dim() const { return dim_; }
    const std::vector<double>& axes() const { return a_; }
    double eta() const { return eta_; }
    const RealPolynomial& perturbation() const { return q_; }

    double r(const ComplexPoint& z) const;
    double r_real(const Eigen::VectorXd& x) const;
    /// Real gradient of r in (x1, y1, ...) coordinates.
    Eigen::VectorXd grad_real(const Eigen::VectorXd& x) const;
    /// Real Hessian of r, 2d x 2d.
    Eigen::MatrixXd hess_real(const Eigen::VectorXd& x) const;

    /// Holomorphic gradient (dr/dz_j).
    ComplexVector dr(const ComplexPoint& z) const;
    /// Complex Hessian L_jk = d^2 r / dz_j dzbar_k.
    Eigen::MatrixXcd levi_matrix(const ComplexPoint& z) const;
    /// Pure holomorphic second derivatives S_jk = d^2 r / dz_j dz_k.
    Eigen::MatrixXcd holomorphic_hessian(const ComplexPoint& z) const;

    bool contains(const ComplexPoint& z) const { return r(z) < 0.0; }
    bool is_balanced() const { return variant_ != DomainVariant::PerturbedBall; }

    /// Radius bound of the region where the numerical routines are valid.
    static constexpr double kValidityRadius = 2.0;

private:
    DomainVariant variant_ = DomainVariant::Ball;
    int dim_ = 1;
    std::vector<double> a_;
    double eta_ = 0.0;
    RealPolynomial q_;
};

/// Converts a real Hessian to the complex Hessian d^2/dz_j dzbar_k.
Eigen::MatrixXcd complex_hessian_from_real(const Eigen::MatrixXd& h);
/// Converts a real Hessian to the holomorphic part d^2/dz_j dz_k.
Eigen::MatrixXcd holomorphic_hessian_from_real(const Eigen::MatrixXd& h);

}  // namespace kobayashi
