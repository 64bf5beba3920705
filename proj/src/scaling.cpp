#include "kobayashi/scaling.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "kobayashi/geometry.hpp"

namespace kobayashi {

namespace {

constexpr double kMaxDepth = 0.2;
constexpr double kPostTol = 1e-8;

nlohmann::json matrix_json(const Eigen::MatrixXcd& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) rows.push_back(vector_json(m.row(i).transpose()));
    return rows;
}

void check_t(double t) {
    if (!(t >= 0.0 && t < 1.0)) throw PreconditionError("scaling parameter t must lie in [0, 1)");
}

/// Central second differences with one Richardson step, O(h^4).
Eigen::MatrixXd fd_hessian(const std::function<double(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& x,
                           double h) {
    const Eigen::Index n = x.size();
    auto once = [&](double s) {
        Eigen::MatrixXd hm(n, n);
        const double f0 = f(x);
        for (Eigen::Index i = 0; i < n; ++i) {
            Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
            e(i) = s;
            hm(i, i) = (f(x + e) - 2.0 * f0 + f(x - e)) / (s * s);
            for (Eigen::Index j = 0; j < i; ++j) {
                Eigen::VectorXd g = Eigen::VectorXd::Zero(n);
                g(j) = s;
                hm(i, j) = hm(j, i) = (f(x + e + g) - f(x + e - g) - f(x - e + g) + f(x - e - g)) / (4.0 * s * s);
            }
        }
        return hm;
    };
    return (4.0 * once(0.5 * h) - once(h)) / 3.0;
}

Eigen::VectorXd fd_gradient(const std::function<double(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& x,
                            double h) {
    const Eigen::Index n = x.size();
    auto once = [&](double s) {
        Eigen::VectorXd g(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
            e(i) = s;
            g(i) = (f(x + e) - f(x - e)) / (2.0 * s);
        }
        return g;
    };
    return (4.0 * once(0.5 * h) - once(h)) / 3.0;
}

}  // namespace

cplx NormalizationMap::shear_poly(const ComplexVector& u) const { return (u.transpose() * shear * u)(0, 0); }

ComplexPoint NormalizationMap::to_normal(const ComplexPoint& z) const {
    if (z.size() != dim()) throw PreconditionError("dimension mismatch");
    const ComplexVector w = unitary * (z - translation);
    const ComplexVector u = (dilation.cast<cplx>().array() * w.array()).matrix();
    ComplexPoint v = u;
    v(0) += shear_poly(u);
    v(0) += 1.0;
    return v;
}

ComplexPoint NormalizationMap::from_normal(const ComplexPoint& zhat) const {
    if (zhat.size() != dim()) throw PreconditionError("dimension mismatch");
    ComplexVector v = zhat;
    v(0) -= 1.0;
    // u_1 solves A u_1^2 + B u_1 + C = 0 with u' = v'.
    ComplexVector u = v;
    u(0) = 0.0;
    const cplx a = shear(0, 0);
    const cplx b = 1.0 + 2.0 * (shear.row(0).tail(dim() - 1) * v.tail(dim() - 1))(0, 0);
    const cplx c = shear_poly(u) - v(0);
    cplx sq = std::sqrt(b * b - 4.0 * a * c);
    if (std::abs(b - sq) > std::abs(b + sq)) sq = -sq;
    const cplx den = b + sq;
    if (den == cplx(0.0)) throw DomainError("point outside the chart of the normalizing shear");
    u(0) = -2.0 * c / den;
    const ComplexVector w = (u.array() / dilation.cast<cplx>().array()).matrix();
    return translation + unitary.adjoint() * w;
}

double NormalizationMap::defining(const ComplexPoint& zhat) const {
    const ComplexPoint z = from_normal(zhat);
    const ComplexVector u = (dilation.cast<cplx>().array() * (unitary * (z - translation)).array()).matrix();
    const double weight = std::exp(-2.0 * std::real((multiplier.transpose() * u)(0, 0)));
    return weight * domain.r(z) / gradient_norm;
}

nlohmann::json NormalizationMap::to_json() const {
    nlohmann::json j;
    j["domain"] = domain.to_json();
    j["base"] = vector_json(base);
    j["translation"] = vector_json(translation);
    j["unitary"] = matrix_json(unitary);
    j["dilation"] = std::vector<double>(dilation.data(), dilation.data() + dilation.size());
    j["gradient_norm"] = gradient_norm;
    j["multiplier"] = vector_json(multiplier);
    j["shear"] = matrix_json(shear);
    j["depth"] = depth;
    j["order"] = order;
    return j;
}

nlohmann::json ScalingParams::to_json() const {
    return {{"t", t}, {"eta_touch", complex_json(eta_touch)}, {"gamma", complex_json(gamma)}, {"rho_star", rho_star}};
}

LocalForm local_form(const std::function<double(const ComplexPoint&)>& r, const ComplexPoint& at, double h) {
    auto f = [&](const Eigen::VectorXd& x) { return r(to_complex(x)); };
    const Eigen::VectorXd x0 = to_real(at);
    const Eigen::VectorXd g = fd_gradient(f, x0, h);
    const Eigen::MatrixXd hm = fd_hessian(f, x0, h);
    LocalForm out;
    const Eigen::Index d = at.size();
    out.dr.resize(d);
    for (Eigen::Index j = 0; j < d; ++j) out.dr(j) = 0.5 * cplx(g(2 * j), -g(2 * j + 1));
    out.levi = complex_hessian_from_real(hm);
    out.holo = holomorphic_hessian_from_real(hm);
    return out;
}

NormalizedBoundary normalize_boundary(const DomainSpec& domain, const ComplexPoint& z) {
    const int d = domain.dim();
    if (z.size() != d) throw PreconditionError("dimension mismatch");
    const double s = boundary_distance(domain, z);
    if (!(s < kMaxDepth)) throw PreconditionError("normalization needs delta_D(z) < 0.2");
    const BoundaryFrame frame = boundary_frame(domain, z);
    const ComplexPoint& p = frame.nearest;

    const ComplexVector g = domain.dr(p);
    const double gn = g.norm();
    if (!(gn > 0.0)) throw NumericalFailure("vanishing gradient at the boundary point");

    // Columns of V = U^T: g/|g|, then the complex tangent space ordered by Levi eigenvalue.
    Eigen::MatrixXcd v(d, d);
    v.col(0) = g / gn;
    Eigen::VectorXd mu = Eigen::VectorXd::Ones(d);
    const Eigen::MatrixXcd levi = domain.levi_matrix(p);
    if (d > 1) {
        const Eigen::MatrixXcd g1 = v.col(0);
        Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g1);
        const Eigen::MatrixXcd q = qr.householderQ() * Eigen::MatrixXcd::Identity(d, d);
        const Eigen::MatrixXcd t = q.rightCols(d - 1);
        const Eigen::MatrixXcd m = t.adjoint() * levi * t;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (m + m.adjoint()));
        for (int k = 1; k < d; ++k) {
            const int src = d - 1 - k;  // descending order
            mu(k) = es.eigenvalues()(src);
            if (!(mu(k) > 0.0)) throw InvalidDomain("non-positive Levi eigenvalue at the nearest boundary point");
            v.col(k) = t * es.eigenvectors().col(src);
        }
    }

    NormalizationMap map;
    map.domain = domain;
    map.base = z;
    map.translation = p;
    map.unitary = v.transpose();
    map.gradient_norm = gn;
    map.depth = s;
    map.dilation = Eigen::VectorXd::Ones(d);
    for (int k = 1; k < d; ++k) map.dilation(k) = std::sqrt(mu(k) / gn);

    const Eigen::MatrixXcd inv_l = map.dilation.cwiseInverse().cast<cplx>().asDiagonal();
    const Eigen::MatrixXcd herm = inv_l * v.adjoint() * levi * v * inv_l / gn;
    const Eigen::MatrixXcd holo = inv_l * v.adjoint() * domain.holomorphic_hessian(p) * v.conjugate() * inv_l / gn;

    // exp(-2 Re <c, u>) cancels the mixed Hermitian terms u_k conj(u_1) and rescales |u_1|^2.
    map.multiplier = ComplexVector::Zero(d);
    map.multiplier(0) = 0.5 * (herm(0, 0).real() - 1.0);
    for (int k = 1; k < d; ++k) map.multiplier(k) = herm(k, 0);

    // Remaining holomorphic quadratic part: P(u) = u^T R u / 2 - u_1 <c, u>.
    map.shear = 0.5 * holo;
    for (int k = 0; k < d; ++k) {
        map.shear(0, k) -= 0.5 * map.multiplier(k);
        map.shear(k, 0) -= 0.5 * map.multiplier(k);
    }

    ComplexPoint e1 = ComplexPoint::Zero(d);
    e1(0) = 1.0;
    const LocalForm lf = local_form([&](const ComplexPoint& q) { return map.defining(q); }, e1);
    ComplexVector want_dr = ComplexVector::Zero(d);
    want_dr(0) = 1.0;
    const double err = std::max({std::abs(map.defining(e1)), (lf.dr - want_dr).cwiseAbs().maxCoeff(),
                                 (lf.levi - Eigen::MatrixXcd::Identity(d, d)).cwiseAbs().maxCoeff(),
                                 lf.holo.cwiseAbs().maxCoeff()});
    if (!(err < kPostTol)) throw NumericalFailure("normal form postcondition failed, error " + std::to_string(err));

    NormalizedBoundary out;
    out.map = std::move(map);
    out.params.gamma = out.map.shear(0, 0);
    return out;
}

cplx mobius_mt(double t, cplx lambda) {
    if (!(std::abs(t) < 1.0)) throw PreconditionError("mobius_mt needs |t| < 1");
    const cplx den = 1.0 + t * lambda;
    if (den == cplx(0.0)) throw DomainError("mobius_mt pole");
    return (lambda + t) / den;
}

ComplexPoint cayley_At(double t, const ComplexPoint& z) {
    check_t(t);
    const cplx den = 1.0 + t * z(0);
    if (den == cplx(0.0)) throw DomainError("A_t pole");
    ComplexPoint u(z.size());
    u(0) = (z(0) + t) / den;
    u.tail(z.size() - 1) = std::sqrt(1.0 - t * t) * z.tail(z.size() - 1) / den;
    return u;
}

ComplexPoint cayley_At_inverse(double t, const ComplexPoint& u) {
    check_t(t);
    const cplx den = 1.0 - t * u(0);
    if (den == cplx(0.0)) throw DomainError("A_t inverse pole");
    ComplexPoint z(u.size());
    z(0) = (u(0) - t) / den;
    // 1 + t z_1 = (1 - t^2) / (1 - t u_1)
    z.tail(u.size() - 1) = std::sqrt(1.0 - t * t) * u.tail(u.size() - 1) / den;
    return z;
}

double scaled_defining_rt(const std::function<double(const ComplexPoint&)>& r, double t, const ComplexPoint& z) {
    check_t(t);
    if (!(z(0).real() > -0.5)) throw PreconditionError("r_t is defined on Re z_1 > -1/2");
    return std::norm(1.0 + t * z(0)) / (1.0 - t * t) * r(cayley_At(t, z));
}

double scaled_defining_rt(const DomainSpec& domain, double t, const ComplexPoint& z) {
    return scaled_defining_rt([&](const ComplexPoint& q) { return domain.r(q); }, t, z);
}

double scaled_defining_rt(const NormalizationMap& map, double t, const ComplexPoint& z) {
    return scaled_defining_rt([&](const ComplexPoint& q) { return map.defining(q); }, t, z);
}

ScalingParams choose_t(const AnalyticDisc& disc, int m) {
    if (m < 8) throw PreconditionError("choose_t needs at least 8 samples");
    const std::vector<ComplexPoint> pts = disc.boundary_samples(m);
    double rho = std::numeric_limits<double>::infinity();
    int arg = 0;
    for (int j = 0; j < m; ++j) {
        const cplx u = pts[j](0);
        const double v = u.real() / (1.0 + std::norm(u));
        if (v < rho) {
            rho = v;
            arg = j;
        }
    }
    if (!(rho > 0.0)) throw PreconditionError("choose_t needs Re phi_1 > 0 on the boundary samples");
    if (rho >= 0.5 - 1e-14) throw BoundaryCase("touching parameter is t = 1");
    ScalingParams out;
    out.rho_star = rho;
    out.t = (1.0 - std::sqrt(1.0 - 4.0 * rho * rho)) / (2.0 * rho);
    out.eta_touch = disc.reparam_inverse(std::polar(1.0, 2.0 * std::numbers::pi * arg / m));
    return out;
}

AnalyticDisc normalize_disc(const NormalizationMap& map, const AnalyticDisc& disc) {
    if (disc.dim() != map.dim()) throw PreconditionError("dimension mismatch");
    const int k_out = 2 * disc.degree();
    const int m = 2 * k_out + 4;
    Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(k_out + 1, map.dim());
    for (int j = 0; j < m; ++j) {
        const cplx s = std::polar(1.0, 2.0 * std::numbers::pi * j / m);
        const ComplexPoint f = map.to_normal(disc.poly(s));
        for (int k = 0; k <= k_out; ++k) c.row(k) += std::pow(std::conj(s), k) * f.transpose();
    }
    AnalyticDisc out(c / static_cast<double>(m));
    out.pre_center = disc.pre_center;
    out.pre_rotation = disc.pre_rotation;
    return out;
}

TransportedDisc transport_disc(double t, const AnalyticDisc& disc, int m, int k_out) {
    check_t(t);
    if (k_out < 1 || m < k_out + 1) throw PreconditionError("transport_disc needs 1 <= k_out < m");
    const int d = disc.dim();
    std::vector<cplx> zeta(m);
    std::vector<ComplexPoint> f(m);
    for (int j = 0; j < m; ++j) {
        zeta[j] = std::polar(1.0, 2.0 * std::numbers::pi * j / m);
        f[j] = cayley_At_inverse(t, disc.poly(zeta[j]));
    }
    // Trigonometric least squares on equispaced samples reduces to the DFT.
    Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(k_out + 1, d);
    for (int k = 0; k <= k_out; ++k) {
        for (int j = 0; j < m; ++j) c.row(k) += std::pow(std::conj(zeta[j]), k) * f[j].transpose();
        c.row(k) /= static_cast<double>(m);
    }
    TransportedDisc out{AnalyticDisc(c), 0.0};
    out.disc.pre_center = disc.pre_center;
    out.disc.pre_rotation = disc.pre_rotation;
    for (int j = 0; j < m; ++j) out.residual = std::max(out.residual, (out.disc.poly(zeta[j]) - f[j]).norm());
    return out;
}

TangentialRatio tangential_ratio(double t, const ComplexPoint& x, const ComplexPoint& y) {
    check_t(t);
    if (x.size() != y.size() || x.size() < 2) throw PreconditionError("tangential ratio needs matching dimension >= 2");
    const double yt = y.tail(y.size() - 1).norm();
    if (yt == 0.0) throw DegenerateInput("tangential part of y vanishes");
    const double sq = std::sqrt(1.0 - t * t);
    return {sq * std::abs(x(0) - y(0)) / (std::abs(1.0 + t * x(0)) * yt), sq};
}

}  // namespace kobayashi
