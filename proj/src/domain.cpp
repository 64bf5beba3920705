#include "kobayashi/domain.hpp"

#include <cmath>
#include <sstream>

#include "kobayashi/errors.hpp"

namespace kobayashi {

Eigen::VectorXd to_real(const ComplexVector& z) {
    Eigen::VectorXd x(2 * z.size());
    for (Eigen::Index j = 0; j < z.size(); ++j) {
        x(2 * j) = z(j).real();
        x(2 * j + 1) = z(j).imag();
    }
    return x;
}

ComplexVector to_complex(const Eigen::VectorXd& x) {
    ComplexVector z(x.size() / 2);
    for (Eigen::Index j = 0; j < z.size(); ++j) z(j) = cplx(x(2 * j), x(2 * j + 1));
    return z;
}

cplx hermitian(const ComplexVector& u, const ComplexVector& v) {
    cplx s = 0.0;
    for (Eigen::Index j = 0; j < u.size(); ++j) s += u(j) * std::conj(v(j));
    return s;
}

// ---------------------------------------------------------------------------
// RealPolynomial

RealPolynomial::RealPolynomial(int dim, std::vector<Monomial> terms)
    : dim_(dim), terms_(std::move(terms)) {
    for (const auto& t : terms_) {
        if (static_cast<int>(t.exponents.size()) != 2 * dim_)
            throw ParseError("monomial exponent vector has wrong length");
        int deg = 0;
        for (int e : t.exponents) {
            if (e < 0) throw ParseError("negative exponent in monomial");
            deg += e;
        }
        if (deg > 4) throw ParseError("perturbation polynomial degree exceeds 4");
        if (!std::isfinite(t.coefficient)) throw ParseError("non-finite polynomial coefficient");
    }
}

int RealPolynomial::degree() const {
    int best = 0;
    for (const auto& t : terms_) {
        int deg = 0;
        for (int e : t.exponents) deg += e;
        best = std::max(best, deg);
    }
    return best;
}

namespace {

/// Table p(i, e) = x_i^e for e = 0..4.
Eigen::Matrix<double, Eigen::Dynamic, 5> power_table(const Eigen::VectorXd& x) {
    Eigen::Matrix<double, Eigen::Dynamic, 5> p(x.size(), 5);
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        p(i, 0) = 1.0;
        for (int e = 1; e < 5; ++e) p(i, e) = p(i, e - 1) * x(i);
    }
    return p;
}

}  // namespace

double RealPolynomial::value(const Eigen::VectorXd& x) const {
    const auto p = power_table(x);
    double s = 0.0;
    for (const auto& t : terms_) {
        double m = t.coefficient;
        for (int i = 0; i < 2 * dim_; ++i) m *= p(i, t.exponents[i]);
        s += m;
    }
    return s;
}

Eigen::VectorXd RealPolynomial::gradient(const Eigen::VectorXd& x) const {
    const int n = 2 * dim_;
    const auto p = power_table(x);
    Eigen::VectorXd g = Eigen::VectorXd::Zero(n);
    for (const auto& t : terms_) {
        const auto& e = t.exponents;
        for (int i = 0; i < n; ++i) {
            if (e[i] == 0) continue;
            double m = t.coefficient * e[i];
            for (int k = 0; k < n; ++k) m *= p(k, e[k] - (k == i ? 1 : 0));
            g(i) += m;
        }
    }
    return g;
}

Eigen::MatrixXd RealPolynomial::hessian(const Eigen::VectorXd& x) const {
    const int n = 2 * dim_;
    const auto p = power_table(x);
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
    for (const auto& t : terms_) {
        const auto& e = t.exponents;
        for (int i = 0; i < n; ++i) {
            if (e[i] == 0) continue;
            for (int j = i; j < n; ++j) {
                const int ej = e[j] - (i == j ? 1 : 0);
                if (ej == 0) continue;
                double m = t.coefficient * e[i] * ej;
                for (int k = 0; k < n; ++k) m *= p(k, e[k] - (k == i ? 1 : 0) - (k == j ? 1 : 0));
                h(i, j) += m;
                if (i != j) h(j, i) += m;
            }
        }
    }
    return h;
}

RealPolynomial reference_perturbation(int dim) {
    if (dim < 2) throw PreconditionError("reference perturbation needs d >= 2");
    auto mono = [dim](std::initializer_list<std::pair<int, int>> powers, double c) {
        Monomial m{std::vector<int>(2 * dim, 0), c};
        for (auto [i, e] : powers) m.exponents[i] = e;
        return m;
    };
    return RealPolynomial(dim, {mono({{0, 4}}, 1.0), mono({{2, 2}, {3, 2}}, 1.0), mono({{0, 1}, {3, 2}}, 0.5)});
}

std::vector<int> RealPolynomial::parse_key(const std::string& key, int dim) {
    std::vector<int> e(2 * dim, 0);
    if (key == "1" || key.empty()) return e;
    std::stringstream ss(key);
    std::string factor;
    while (std::getline(ss, factor, '*')) {
        if (factor.size() < 2 || (factor[0] != 'x' && factor[0] != 'y'))
            throw ParseError("bad monomial factor '" + factor + "' in key '" + key + "'");
        const auto caret = factor.find('^');
        int idx = 0;
        int power = 1;
        try {
            idx = std::stoi(factor.substr(1, caret == std::string::npos ? std::string::npos : caret - 1));
            if (caret != std::string::npos) power = std::stoi(factor.substr(caret + 1));
        } catch (const std::exception&) {
            throw ParseError("bad monomial factor '" + factor + "'");
        }
        if (idx < 1 || idx > dim) throw ParseError("monomial variable index out of range in '" + key + "'");
        if (power < 0) throw ParseError("negative power in '" + key + "'");
        e[2 * (idx - 1) + (factor[0] == 'y' ? 1 : 0)] += power;
    }
    return e;
}

std::string RealPolynomial::format_key(const std::vector<int>& exponents) {
    std::string out;
    for (size_t i = 0; i < exponents.size(); ++i) {
        if (exponents[i] == 0) continue;
        if (!out.empty()) out += '*';
        out += (i % 2 == 0 ? 'x' : 'y');
        out += std::to_string(i / 2 + 1);
        if (exponents[i] > 1) out += '^' + std::to_string(exponents[i]);
    }
    return out.empty() ? "1" : out;
}

// ---------------------------------------------------------------------------
// DomainSpec

DomainSpec DomainSpec::ball(int dim) {
    if (dim < 1) throw DomainError("dimension must be at least 1");
    DomainSpec d;
    d.variant_ = DomainVariant::Ball;
    d.dim_ = dim;
    d.a_.assign(dim, 1.0);
    return d;
}

DomainSpec DomainSpec::ellipsoid(std::vector<double> a) {
    if (a.empty()) throw DomainError("dimension must be at least 1");
    for (double v : a)
        if (!(v > 0.0) || !std::isfinite(v)) throw DomainError("ellipsoid axes must be positive and finite");
    DomainSpec d;
    d.variant_ = DomainVariant::Ellipsoid;
    d.dim_ = static_cast<int>(a.size());
    d.a_ = std::move(a);
    return d;
}

DomainSpec DomainSpec::perturbed_ball(int dim, double eta, RealPolynomial q) {
    if (dim < 1) throw DomainError("dimension must be at least 1");
    if (q.dim() != dim && !q.terms().empty()) throw DomainError("perturbation dimension mismatch");
    if (!std::isfinite(eta)) throw DomainError("eta must be finite");
    DomainSpec d;
    d.variant_ = DomainVariant::PerturbedBall;
    d.dim_ = dim;
    d.a_.assign(dim, 1.0);
    d.eta_ = eta;
    d.q_ = std::move(q);
    return d;
}

DomainSpec DomainSpec::from_json(const nlohmann::json& j) {
    try {
        const std::string variant = j.at("variant").get<std::string>();
        const int dim = j.at("dim").get<int>();
        if (variant == "ball") return ball(dim);
        if (variant == "ellipsoid") {
            auto a = j.at("a").get<std::vector<double>>();
            if (static_cast<int>(a.size()) != dim) throw ParseError("ellipsoid 'a' length must equal 'dim'");
            return ellipsoid(std::move(a));
        }
        if (variant == "perturbed_ball") {
            std::vector<Monomial> terms;
            if (j.contains("q")) {
                for (const auto& [key, coef] : j.at("q").items())
                    terms.push_back({RealPolynomial::parse_key(key, dim), coef.get<double>()});
            }
            return perturbed_ball(dim, j.value("eta", 0.0), RealPolynomial(dim, std::move(terms)));
        }
        throw ParseError("unknown domain variant '" + variant + "'");
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed domain JSON: ") + e.what());
    }
}

nlohmann::json DomainSpec::to_json() const {
    nlohmann::json j;
    j["dim"] = dim_;
    switch (variant_) {
        case DomainVariant::Ball: j["variant"] = "ball"; break;
        case DomainVariant::Ellipsoid:
            j["variant"] = "ellipsoid";
            j["a"] = a_;
            break;
        case DomainVariant::PerturbedBall: {
            j["variant"] = "perturbed_ball";
            j["eta"] = eta_;
            nlohmann::json q = nlohmann::json::object();
            for (const auto& t : q_.terms()) q[RealPolynomial::format_key(t.exponents)] = t.coefficient;
            j["q"] = q;
            break;
        }
    }
    return j;
}

double DomainSpec::r_real(const Eigen::VectorXd& x) const {
    double s = -1.0;
    for (int j = 0; j < dim_; ++j) s += a_[j] * (x(2 * j) * x(2 * j) + x(2 * j + 1) * x(2 * j + 1));
    if (variant_ == DomainVariant::PerturbedBall) s += eta_ * q_.value(x);
    return s;
}

double DomainSpec::r(const ComplexPoint& z) const {
    if (variant_ != DomainVariant::PerturbedBall) {
        double s = -1.0;
        for (int j = 0; j < dim_; ++j) s += a_[j] * std::norm(z(j));
        return s;
    }
    return r_real(to_real(z));
}

Eigen::VectorXd DomainSpec::grad_real(const Eigen::VectorXd& x) const {
    Eigen::VectorXd g(2 * dim_);
    for (int j = 0; j < dim_; ++j) {
        g(2 * j) = 2.0 * a_[j] * x(2 * j);
        g(2 * j + 1) = 2.0 * a_[j] * x(2 * j + 1);
    }
    if (variant_ == DomainVariant::PerturbedBall) g += eta_ * q_.gradient(x);
    return g;
}

Eigen::MatrixXd DomainSpec::hess_real(const Eigen::VectorXd& x) const {
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(2 * dim_, 2 * dim_);
    for (int j = 0; j < dim_; ++j) {
        h(2 * j, 2 * j) = 2.0 * a_[j];
        h(2 * j + 1, 2 * j + 1) = 2.0 * a_[j];
    }
    if (variant_ == DomainVariant::PerturbedBall) h += eta_ * q_.hessian(x);
    return h;
}

ComplexVector DomainSpec::dr(const ComplexPoint& z) const {
    const Eigen::VectorXd g = grad_real(to_real(z));
    ComplexVector out(dim_);
    for (int j = 0; j < dim_; ++j) out(j) = 0.5 * cplx(g(2 * j), -g(2 * j + 1));
    return out;
}

Eigen::MatrixXcd complex_hessian_from_real(const Eigen::MatrixXd& h) {
    const Eigen::Index d = h.rows() / 2;
    Eigen::MatrixXcd l(d, d);
    for (Eigen::Index j = 0; j < d; ++j) {
        for (Eigen::Index k = 0; k < d; ++k) {
            const double xx = h(2 * j, 2 * k), yy = h(2 * j + 1, 2 * k + 1);
            const double xy = h(2 * j, 2 * k + 1), yx = h(2 * j + 1, 2 * k);
            l(j, k) = 0.25 * cplx(xx + yy, xy - yx);
        }
    }
    return l;
}

Eigen::MatrixXcd holomorphic_hessian_from_real(const Eigen::MatrixXd& h) {
    const Eigen::Index d = h.rows() / 2;
    Eigen::MatrixXcd s(d, d);
    for (Eigen::Index j = 0; j < d; ++j) {
        for (Eigen::Index k = 0; k < d; ++k) {
            const double xx = h(2 * j, 2 * k), yy = h(2 * j + 1, 2 * k + 1);
            const double xy = h(2 * j, 2 * k + 1), yx = h(2 * j + 1, 2 * k);
            s(j, k) = 0.25 * cplx(xx - yy, -(xy + yx));
        }
    }
    return s;
}

Eigen::MatrixXcd DomainSpec::levi_matrix(const ComplexPoint& z) const {
    return complex_hessian_from_real(hess_real(to_real(z)));
}

Eigen::MatrixXcd DomainSpec::holomorphic_hessian(const ComplexPoint& z) const {
    return holomorphic_hessian_from_real(hess_real(to_real(z)));
}

}  // namespace kobayashi
