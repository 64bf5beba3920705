#include "kobayashi/ball_oracle.hpp"

#include <cmath>

#include "kobayashi/disc.hpp"
#include "kobayashi/errors.hpp"

namespace kobayashi {

namespace {

void require_in_ball(const ComplexPoint& z) {
    if (!(z.squaredNorm() < 1.0)) throw DomainError("point is not in the unit ball");
}

}  // namespace

double ball_distance(const ComplexPoint& z, const ComplexPoint& w) {
    require_in_ball(z);
    require_in_ball(w);
    if (z.size() != w.size()) throw DomainError("dimension mismatch");
    const double den = std::norm(1.0 - hermitian(z, w));
    // |1 - <z,w>|^2 - (1 - |z|^2)(1 - |w|^2) = |z - w|^2 - sum_{j<k} |z_j w_k - z_k w_j|^2
    double lagrange = 0.0;
    for (Eigen::Index j = 0; j < z.size(); ++j)
        for (Eigen::Index k = j + 1; k < z.size(); ++k) lagrange += std::norm(z(j) * w(k) - z(k) * w(j));
    const double num = std::max(0.0, (z - w).squaredNorm() - lagrange);
    const double one_minus_t2 = (1.0 - z.squaredNorm()) * (1.0 - w.squaredNorm()) / den;
    return atanh_stable(std::min(1.0, std::sqrt(num / den)), one_minus_t2);
}

BallGeodesicSpec ball_geodesic(const ComplexPoint& z, const ComplexPoint& w) {
    require_in_ball(z);
    require_in_ball(w);
    const double len = (w - z).norm();
    if (len == 0.0) throw DegenerateInput("ball_geodesic needs z != w");
    const ComplexVector u = (w - z) / len;
    const cplx zu = hermitian(z, u);
    const ComplexPoint c0 = z - zu * u;
    const double radius = std::sqrt(1.0 - c0.squaredNorm());
    const cplx xi_z = zu / radius;
    const cplx xi_w = (zu + len) / radius;

    BallGeodesicSpec g;
    g.disc = AnalyticDisc::affine(c0, radius * u);
    const cplx pulled = mobius(-xi_z, xi_w);  // m_{xi_z}^{-1}(xi_w)
    g.alpha = std::abs(pulled);
    g.disc.pre_center = xi_z;
    g.disc.pre_rotation = g.alpha > 0.0 ? pulled / g.alpha : cplx(1.0);
    return g;
}

double ball_metric(const ComplexPoint& z, const ComplexVector& x) {
    require_in_ball(z);
    const double s = 1.0 - z.squaredNorm();
    return std::sqrt(x.squaredNorm() / s + std::norm(hermitian(x, z)) / (s * s));
}

double minkowski(const DomainSpec& domain, const ComplexVector& w) {
    if (!domain.is_balanced()) throw UnsupportedDomain("Minkowski functional needs a ball or ellipsoid");
    double s = 0.0;
    for (int j = 0; j < domain.dim(); ++j) s += domain.axes()[j] * std::norm(w(j));
    return std::sqrt(s);
}

double balanced_distance_from_origin(const DomainSpec& domain, const ComplexPoint& w) {
    const double mu = minkowski(domain, w);
    if (mu == 0.0) throw DegenerateInput("w must be nonzero");
    if (!(mu < 1.0)) throw DomainError("w is not inside the domain");
    return atanh_stable(mu, (1.0 - mu) * (1.0 + mu));
}

double balanced_metric_at_origin(const DomainSpec& domain, const ComplexVector& x) { return minkowski(domain, x); }

}  // namespace kobayashi
