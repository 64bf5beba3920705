#include "kobayashi/analytic_disc.hpp"

#include <cmath>
#include <numbers>

#include "kobayashi/errors.hpp"

namespace kobayashi {

ComplexPoint AnalyticDisc::poly(cplx s) const {
    ComplexPoint out = coeffs.row(degree()).transpose();
    for (int k = degree() - 1; k >= 0; --k) out = (out * s + coeffs.row(k).transpose()).eval();
    return out;
}

ComplexVector AnalyticDisc::poly_derivative(cplx s) const {
    ComplexVector out = ComplexVector::Zero(dim());
    for (int k = degree(); k >= 1; --k) out = (out * s + double(k) * coeffs.row(k).transpose()).eval();
    return out;
}

cplx AnalyticDisc::reparam(cplx zeta) const { return mobius(pre_center, pre_rotation * zeta); }

cplx AnalyticDisc::reparam_inverse(cplx s) const { return mobius(-pre_center, s) / pre_rotation; }

ComplexVector AnalyticDisc::derivative(cplx zeta) const {
    const cplx tau = reparam(zeta);
    return poly_derivative(tau) * (mobius_derivative(pre_center, pre_rotation * zeta) * pre_rotation);
}

std::vector<ComplexPoint> AnalyticDisc::boundary_samples(int m) const {
    std::vector<ComplexPoint> out;
    out.reserve(m);
    for (int j = 0; j < m; ++j) out.push_back(poly(std::polar(1.0, 2.0 * std::numbers::pi * j / m)));
    return out;
}

nlohmann::json complex_json(cplx z) { return nlohmann::json::array({z.real(), z.imag()}); }

nlohmann::json vector_json(const ComplexVector& v) {
    nlohmann::json a = nlohmann::json::array();
    for (Eigen::Index j = 0; j < v.size(); ++j) a.push_back(complex_json(v(j)));
    return a;
}

ComplexVector vector_from_json(const nlohmann::json& j) {
    ComplexVector v(j.size());
    for (size_t i = 0; i < j.size(); ++i) v(i) = cplx(j[i].at(0).get<double>(), j[i].at(1).get<double>());
    return v;
}

nlohmann::json AnalyticDisc::to_json() const {
    nlohmann::json j;
    j["degree"] = degree();
    nlohmann::json rows = nlohmann::json::array();
    for (int k = 0; k <= degree(); ++k) rows.push_back(vector_json(coeffs.row(k).transpose()));
    j["coeffs"] = rows;
    j["pre_center"] = complex_json(pre_center);
    j["pre_rotation"] = complex_json(pre_rotation);
    return j;
}

AnalyticDisc AnalyticDisc::from_json(const nlohmann::json& j) {
    const auto& rows = j.at("coeffs");
    if (rows.empty()) throw ParseError("disc needs at least one coefficient row");
    const ComplexVector first = vector_from_json(rows[0]);
    Eigen::MatrixXcd c(rows.size(), first.size());
    for (size_t k = 0; k < rows.size(); ++k) c.row(k) = vector_from_json(rows[k]).transpose();
    AnalyticDisc d(c);
    if (j.contains("pre_center")) d.pre_center = cplx(j["pre_center"][0].get<double>(), j["pre_center"][1].get<double>());
    if (j.contains("pre_rotation"))
        d.pre_rotation = cplx(j["pre_rotation"][0].get<double>(), j["pre_rotation"][1].get<double>());
    return d;
}

AnalyticDisc AnalyticDisc::affine(const ComplexPoint& center, const ComplexVector& direction) {
    Eigen::MatrixXcd c(2, center.size());
    c.row(0) = center.transpose();
    c.row(1) = direction.transpose();
    return AnalyticDisc(c);
}

}  // namespace kobayashi
