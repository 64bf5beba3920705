// Extremal-disc solver.
//
// A disc is a polynomial P of degree K carrying z and w at free parameters
// a, b of the unit disc:
//     P(s) = z + (s - a)(w - z)/(b - a) + (s - a)(s - b) Q(s),   a real,
// so P(a) = z and P(b) = w hold identically. The Lempert value k_Delta(a, b)
// is minimised subject to r(P(s_j)) <= 0 on the roots of unity s_j, using a
// logarithmic barrier and damped Newton steps. The infinitesimal problem uses
//     P(s) = z + (s - a) lambda X + (s - a)^2 Q(s),   lambda > 0,
// and minimises log kappa = -log(lambda (1 - |a|^2)).

#include "kobayashi/lempert.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "kobayashi/ball_oracle.hpp"
#include "kobayashi/disc.hpp"
#include "kobayashi/errors.hpp"
#include "kobayashi/geometry.hpp"

namespace kobayashi {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kDegeneratePair = 1e-8;
// Largest r accepted on the refined boundary grid of a solved disc.
constexpr double kFeasTol = 1e-9;

double re_dot(const ComplexVector& gamma, const ComplexVector& v) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) s += (std::conj(gamma(i)) * v(i)).real();
    return s;
}

constexpr double kFocusRadius = 0.5;

/// Roots of unity, plus their images under the automorphism centred at `focus`
/// when the marked point is far out: the boundary arc near focus / |focus|
/// carries the geometry near z and needs nodes at scale 1 - |focus|.
std::vector<cplx> constraint_nodes(int m, cplx focus) {
    std::vector<cplx> nodes;
    for (int j = 0; j < m; ++j) nodes.push_back(std::polar(1.0, 2.0 * std::numbers::pi * j / m));
    if (std::abs(focus) > kFocusRadius) {
        for (int j = 0; j < m; ++j) {
            const cplx s = mobius(focus, std::polar(1.0, 2.0 * std::numbers::pi * (j + 0.5) / m));
            nodes.push_back(s / std::abs(s));
        }
    }
    return nodes;
}

/// Polynomial disc family with holomorphic dependence on its parameters.
class DiscFamily {
public:
    DiscFamily(int dim, int degree) : dim_(dim), degree_(degree) {}
    virtual ~DiscFamily() = default;

    int n_q() const { return 2 * dim_ * (degree_ - 1); }
    virtual int n_head() const = 0;
    int size() const { return n_head() + n_q(); }

    virtual bool admissible(const Eigen::VectorXd& x) const = 0;
    virtual double objective(const Eigen::VectorXd& x) const = 0;
    virtual void objective_derivs(const Eigen::VectorXd& x, Eigen::VectorXd& g, Eigen::MatrixXd& h) const = 0;
    /// P(s) and the complex derivatives dP/dx_v for every real variable.
    virtual void point(const Eigen::VectorXd& x, cplx s, ComplexVector& p, Eigen::MatrixXcd* dp) const = 0;
    /// h += Re <gamma, d^2 P(s) / dx dx> for the nonlinear variable pairs.
    virtual void add_curvature(const Eigen::VectorXd& x, cplx s, const ComplexVector& gamma,
                               Eigen::MatrixXd& h) const = 0;
    virtual Eigen::MatrixXcd coefficients(const Eigen::VectorXd& x) const = 0;

protected:
    ComplexVector q_at(const Eigen::VectorXd& x, cplx s) const {
        ComplexVector q = ComplexVector::Zero(dim_);
        for (int m = degree_ - 2; m >= 0; --m) {
            q *= s;
            for (int i = 0; i < dim_; ++i) q(i) += qcoef(x, m, i);
        }
        return q;
    }
    cplx qcoef(const Eigen::VectorXd& x, int m, int i) const {
        const int k = qindex(m, i);
        return {x(k), x(k + 1)};
    }
    int qindex(int m, int i) const { return n_head() + 2 * (m * dim_ + i); }

    /// Columns dP/dQ: base * s^m e_i for the real part, i times that for the imaginary part.
    void fill_q(cplx s, cplx base, Eigen::MatrixXcd& dp) const {
        dp.rightCols(n_q()).setZero();
        cplx sm = base;
        for (int m = 0; m <= degree_ - 2; ++m) {
            for (int i = 0; i < dim_; ++i) {
                const int k = qindex(m, i);
                dp(i, k) = sm;
                dp(i, k + 1) = cplx(0.0, 1.0) * sm;
            }
            sm *= s;
        }
    }

    /// Coefficients of (s^2 + l1 s + l0) Q(s) added to rows of c.
    void add_quadratic_times_q(const Eigen::VectorXd& x, cplx l0, cplx l1, Eigen::MatrixXcd& c) const {
        for (int m = 0; m <= degree_ - 2; ++m) {
            for (int i = 0; i < dim_; ++i) {
                const cplx q = qcoef(x, m, i);
                c(m, i) += l0 * q;
                c(m + 1, i) += l1 * q;
                c(m + 2, i) += q;
            }
        }
    }

    int dim_;
    int degree_;
};

/// Pair problem. The gauge is frozen at the seed: z sits at the fixed
/// parameter a, w at b(rho) = mobius(a, rho e), and the variables are (rho, Q).
class PairFamily final : public DiscFamily {
public:
    PairFamily(ComplexPoint z, ComplexPoint w, cplx a, cplx e, int degree)
        : DiscFamily(static_cast<int>(z.size()), degree), z_(std::move(z)), delta_(w - z_), a_(a), e_(e) {}

    int n_head() const override { return 1; }
    cplx a() const { return a_; }
    cplx b_of(const Eigen::VectorXd& x) const { return mobius(a_, x(0) * e_); }

    bool admissible(const Eigen::VectorXd& x) const override {
        return x.allFinite() && x(0) > 1e-14 && x(0) < 1.0;
    }

    double objective(const Eigen::VectorXd& x) const override {
        return atanh_stable(x(0), (1.0 - x(0)) * (1.0 + x(0)));
    }

    void objective_derivs(const Eigen::VectorXd& x, Eigen::VectorXd& g, Eigen::MatrixXd& h) const override {
        const double rho = x(0), om = (1.0 - rho) * (1.0 + rho);
        g = Eigen::VectorXd::Zero(size());
        h = Eigen::MatrixXd::Zero(size(), size());
        g(0) = 1.0 / om;
        h(0, 0) = 2.0 * rho / (om * om);
    }

    void point(const Eigen::VectorXd& x, cplx s, ComplexVector& p, Eigen::MatrixXcd* dp) const override {
        const cplx b = b_of(x), e = b - a_;
        const ComplexVector q = q_at(x, s);
        p = z_ + ((s - a_) / e) * delta_ + ((s - a_) * (s - b)) * q;
        if (!dp) return;
        dp->resize(dim_, size());
        dp->col(0) = (-(s - a_) * b1(x)) * (delta_ / (e * e) + q);
        fill_q(s, (s - a_) * (s - b), *dp);
    }

    void add_curvature(const Eigen::VectorXd& x, cplx s, const ComplexVector& gamma,
                       Eigen::MatrixXd& h) const override {
        const cplx b = b_of(x), e = b - a_, db = b1(x);
        const ComplexVector q = q_at(x, s);
        const ComplexVector dbb = (2.0 * (s - a_) / (e * e * e)) * delta_;
        const ComplexVector d1 = -(s - a_) * (delta_ / (e * e) + q);
        h(0, 0) += re_dot(gamma, (db * db) * dbb + b2(x) * d1);
        const cplx I(0.0, 1.0);
        cplx sm = 1.0;
        for (int m = 0; m <= degree_ - 2; ++m) {
            for (int i = 0; i < dim_; ++i) {
                const int k = qindex(m, i);
                const cplx v = std::conj(gamma(i)) * (-(s - a_) * sm * db);
                h(0, k) += v.real();
                h(k, 0) += v.real();
                h(0, k + 1) += (I * v).real();
                h(k + 1, 0) += (I * v).real();
            }
            sm *= s;
        }
    }

    Eigen::MatrixXcd coefficients(const Eigen::VectorXd& x) const override {
        const cplx b = b_of(x);
        const ComplexVector v = delta_ / (b - a_);
        Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(degree_ + 1, dim_);
        c.row(0) = (z_ - a_ * v).transpose();
        c.row(1) = v.transpose();
        add_quadratic_times_q(x, a_ * b, -(a_ + b), c);
        return c;
    }

private:
    // db/drho and d^2b/drho^2.
    cplx b1(const Eigen::VectorXd& x) const {
        const cplx den = 1.0 + std::conj(a_) * e_ * x(0);
        return e_ * (1.0 - std::norm(a_)) / (den * den);
    }
    cplx b2(const Eigen::VectorXd& x) const {
        const cplx den = 1.0 + std::conj(a_) * e_ * x(0);
        return -2.0 * std::conj(a_) * e_ * e_ * (1.0 - std::norm(a_)) / (den * den * den);
    }

    ComplexPoint z_;
    ComplexVector delta_;
    cplx a_, e_;
};

/// Infinitesimal problem with z frozen at the parameter a: variables (log lambda, Q).
class DirFamily final : public DiscFamily {
public:
    DirFamily(ComplexPoint z, ComplexVector xv, cplx a, int degree)
        : DiscFamily(static_cast<int>(z.size()), degree), z_(std::move(z)), x_(std::move(xv)), a_(a) {}

    int n_head() const override { return 1; }
    cplx a() const { return a_; }

    bool admissible(const Eigen::VectorXd& x) const override { return x.allFinite() && std::abs(x(0)) < 700.0; }

    double objective(const Eigen::VectorXd& x) const override {
        const double r = std::abs(a_);
        return -x(0) - std::log((1.0 - r) * (1.0 + r));
    }

    void objective_derivs(const Eigen::VectorXd&, Eigen::VectorXd& g, Eigen::MatrixXd& h) const override {
        g = Eigen::VectorXd::Zero(size());
        h = Eigen::MatrixXd::Zero(size(), size());
        g(0) = -1.0;
    }

    void point(const Eigen::VectorXd& x, cplx s, ComplexVector& p, Eigen::MatrixXcd* dp) const override {
        const double lambda = std::exp(x(0));
        p = z_ + ((s - a_) * lambda) * x_ + ((s - a_) * (s - a_)) * q_at(x, s);
        if (!dp) return;
        dp->resize(dim_, size());
        dp->col(0) = ((s - a_) * lambda) * x_;
        fill_q(s, (s - a_) * (s - a_), *dp);
    }

    void add_curvature(const Eigen::VectorXd& x, cplx s, const ComplexVector& gamma,
                       Eigen::MatrixXd& h) const override {
        h(0, 0) += re_dot(gamma, ((s - a_) * std::exp(x(0))) * x_);
    }

    Eigen::MatrixXcd coefficients(const Eigen::VectorXd& x) const override {
        const double lambda = std::exp(x(0));
        Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(degree_ + 1, dim_);
        c.row(0) = (z_ - (a_ * lambda) * x_).transpose();
        c.row(1) = (lambda * x_).transpose();
        add_quadratic_times_q(x, a_ * a_, -2.0 * a_, c);
        return c;
    }

private:
    ComplexPoint z_;
    ComplexVector x_;
    cplx a_;
};

struct BarrierOutcome {
    Eigen::VectorXd x;
    bool converged = false;
    int iterations = 0;
    std::vector<double> stage_values;
};

/// Log-barrier Newton method for min f(x) s.t. r(P_x(s_j)) < 0.
class BarrierSolver {
public:
    BarrierSolver(const DomainSpec& domain, const DiscFamily& fam, const SolverConfig& cfg, cplx focus)
        : domain_(domain), fam_(fam), cfg_(cfg), nodes_(constraint_nodes(cfg.grid, focus)) {}

    double barrier(const Eigen::VectorXd& x, double mu) const {
        if (!fam_.admissible(x)) return kInf;
        double sum = 0.0;
        ComplexVector p;
        for (cplx s : nodes_) {
            fam_.point(x, s, p, nullptr);
            const double r = domain_.r(p);
            if (!(r < 0.0)) return kInf;
            sum += std::log(-r);
        }
        return fam_.objective(x) - mu * sum;
    }

    void derivs(const Eigen::VectorXd& x, double mu, Eigen::VectorXd& g, Eigen::MatrixXd& h) const {
        fam_.objective_derivs(x, g, h);
        const int n = fam_.size();
        const int d = domain_.dim();
        ComplexVector p;
        Eigen::MatrixXcd dp;
        Eigen::MatrixXd jac(2 * d, n);
        for (cplx s : nodes_) {
            fam_.point(x, s, p, &dp);
            const Eigen::VectorXd pr = to_real(p);
            const double r = domain_.r_real(pr);
            const Eigen::VectorXd gr = domain_.grad_real(pr);
            const Eigen::MatrixXd hr = domain_.hess_real(pr);
            for (int i = 0; i < d; ++i) {
                jac.row(2 * i) = dp.row(i).real();
                jac.row(2 * i + 1) = dp.row(i).imag();
            }
            const double w = mu / (-r);
            const Eigen::VectorXd gj = jac.transpose() * gr;
            g += w * gj;
            h.noalias() += (w / (-r)) * gj * gj.transpose();
            h.noalias() += w * jac.transpose() * (hr * jac);
            ComplexVector gamma(d);
            for (int i = 0; i < d; ++i) gamma(i) = w * cplx(gr(2 * i), gr(2 * i + 1));
            fam_.add_curvature(x, s, gamma, h);
        }
    }

    BarrierOutcome run(Eigen::VectorXd x) const {
        BarrierOutcome out;
        const int n = fam_.size();
        bool all_ok = true;
        for (double mu = cfg_.barrier_start; mu >= cfg_.barrier_end * (1.0 - 1e-9); mu *= cfg_.barrier_factor) {
            bool stage_ok = false;
            double phi = barrier(x, mu);
            if (!std::isfinite(phi)) throw NumericalFailure("barrier solver lost feasibility");
            for (int it = 0; it < cfg_.max_iter; ++it) {
                ++out.iterations;
                Eigen::VectorXd g;
                Eigen::MatrixXd h;
                derivs(x, mu, g, h);
                Eigen::VectorXd step;
                const double scale = h.diagonal().cwiseAbs().maxCoeff();
                Eigen::LDLT<Eigen::MatrixXd> ldlt(h);
                if (ldlt.info() == Eigen::Success && ldlt.isPositive() &&
                    (ldlt.vectorD().array() > 1e-14 * scale).all())
                    step = ldlt.solve(-g);
                if (step.size() != n || !step.allFinite() || !(g.dot(step) < 0.0)) {
                    // Indefinite: flip negative curvature.
                    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
                    const double floor = 1e-13 * std::max(scale, 1.0);
                    Eigen::VectorXd lam = es.eigenvalues().cwiseAbs().cwiseMax(floor);
                    step = -es.eigenvectors() * ((es.eigenvectors().transpose() * g).cwiseQuotient(lam));
                }
                if (step.size() != n) break;
                const double decrement = -g.dot(step);
                if (0.5 * decrement < cfg_.tol) {
                    stage_ok = true;
                    break;
                }
                double t = 1.0, phi_new = kInf;
                for (int ls = 0; ls < 80; ++ls) {
                    phi_new = barrier(x + t * step, mu);
                    if (phi_new <= phi - 1e-4 * t * decrement) break;
                    t *= 0.5;
                }
                if (!(phi_new < phi)) {
                    // No progress at working precision.
                    stage_ok = decrement < 1e-6 * (1.0 + std::abs(phi));
                    break;
                }
                x += t * step;
                phi = phi_new;
            }
            all_ok = all_ok && stage_ok;
            out.stage_values.push_back(fam_.objective(x));
        }
        out.x = x;
        out.converged = all_ok;
        return out;
    }

private:
    const DomainSpec& domain_;
    const DiscFamily& fam_;
    const SolverConfig& cfg_;
    std::vector<cplx> nodes_;
};

double max_r_on(const DomainSpec& domain, const AnalyticDisc& disc, int m, cplx focus) {
    double worst = -kInf;
    for (cplx s : constraint_nodes(m, focus)) worst = std::max(worst, domain.r(disc.poly(s)));
    return worst;
}

void require_inside(const DomainSpec& domain, const ComplexPoint& z, const char* what) {
    if (z.size() != domain.dim()) throw DomainError(std::string(what) + " has the wrong dimension");
    if (!z.allFinite()) throw DomainError(std::string(what) + " has non-finite coordinates");
    if (!(domain.r(z) < 0.0)) throw DomainError(std::string(what) + " is not inside the domain");
}

/// Shrink factor applied to the affine seed so that it is strictly inside.
double seed_shrink(cplx a0, cplx b0) {
    // Radial shrink of the disc image moves the parameters outward by 1/(1-eps).
    const double room = 1.0 - std::max(std::abs(a0), std::abs(b0));
    return std::min(1e-3, 0.5 * room);
}

}  // namespace

void SolverConfig::validate() const {
    if (degree < 2) throw PreconditionError("solver degree must be at least 2");
    if (grid < 4 * degree) throw PreconditionError("boundary grid must have at least 4 * degree points");
    if (!(barrier_start > 0.0) || !(barrier_end > 0.0) || barrier_end > barrier_start)
        throw PreconditionError("barrier schedule must be positive and decreasing");
    if (!(barrier_factor > 0.0 && barrier_factor < 1.0)) throw PreconditionError("barrier factor must be in (0,1)");
    if (max_iter < 1) throw PreconditionError("max_iter must be positive");
}

SolverConfig SolverConfig::reduced() const {
    SolverConfig c = *this;
    c.degree = std::max(2, degree / 2);
    c.grid = std::max(4 * c.degree, grid / 2);
    c.barrier_end = std::max(barrier_end, 1e-9);
    c.certify = false;
    return c;
}

nlohmann::json SolverConfig::to_json() const {
    return {{"degree", degree},        {"grid", grid},       {"barrier_start", barrier_start},
            {"barrier_end", barrier_end}, {"barrier_factor", barrier_factor}, {"tol", tol},
            {"max_iter", max_iter},    {"fd_step", fd_step}, {"residual_threshold", residual_threshold},
            {"certify", certify}};
}

nlohmann::json GeodesicResult::to_json() const {
    nlohmann::json j;
    j["disc"] = disc.to_json();
    j["alpha"] = alpha;
    j["lambda"] = lambda;
    j["value"] = value;
    j["residual"] = std::isfinite(residual) ? nlohmann::json(residual) : nlohmann::json(nullptr);
    j["diam"] = diam;
    j["converged"] = converged;
    j["degenerate_pair"] = degenerate_pair;
    j["from_seed"] = from_seed;
    j["seed_value"] = seed_value;
    j["max_boundary_r"] = max_boundary_r;
    j["zeta_z"] = complex_json(zeta_z);
    j["zeta_w"] = complex_json(zeta_w);
    j["iterations"] = iterations;
    return j;
}

DerivativeCheck barrier_derivative_check(const DomainSpec& domain, const ComplexPoint& z, const ComplexPoint& w,
                                         const SolverConfig& cfg, double mu, double jitter) {
    cfg.validate();
    const AffineBound seed = affine_pair_bound(domain, z, w);
    const double eps = seed_shrink(seed.zeta_z, seed.zeta_w);
    const cplx a = seed.zeta_z / (1.0 - eps);
    const cplx pulled0 = mobius(-a, seed.zeta_w / (1.0 - eps));
    PairFamily fam(z, w, a, pulled0 / std::abs(pulled0), cfg.degree);
    Eigen::VectorXd x = Eigen::VectorXd::Constant(fam.size(), jitter);
    x(0) = std::abs(pulled0);
    for (Eigen::Index i = 1; i < x.size(); i += 3) x(i) = -jitter;
    const BarrierSolver solver(domain, fam, cfg, fam.a());
    if (!std::isfinite(solver.barrier(x, mu))) throw PreconditionError("derivative check point is infeasible");
    Eigen::VectorXd g;
    Eigen::MatrixXd h;
    solver.derivs(x, mu, g, h);
    const double step = cfg.fd_step;
    DerivativeCheck out;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        Eigen::VectorXd xp = x, xm = x;
        xp(i) += step;
        xm(i) -= step;
        const double fd = (solver.barrier(xp, mu) - solver.barrier(xm, mu)) / (2.0 * step);
        out.grad_err = std::max(out.grad_err, std::abs(fd - g(i)));
        Eigen::VectorXd gp, gm;
        Eigen::MatrixXd tmp;
        solver.derivs(xp, mu, gp, tmp);
        solver.derivs(xm, mu, gm, tmp);
        out.hess_err = std::max(out.hess_err, ((gp - gm) / (2.0 * step) - h.col(i)).cwiseAbs().maxCoeff());
    }
    out.grad_err /= std::max(1.0, g.cwiseAbs().maxCoeff());
    out.hess_err /= std::max(1.0, h.cwiseAbs().maxCoeff());
    return out;
}

double disc_diameter(const AnalyticDisc& disc, int m) {
    const auto pts = disc.boundary_samples(m);
    double best = 0.0;
    for (size_t i = 0; i < pts.size(); ++i)
        for (size_t j = i + 1; j < pts.size(); ++j) best = std::max(best, (pts[i] - pts[j]).norm());
    return best;
}

GeodesicResult solve_extremal_dir(const DomainSpec& domain, const ComplexPoint& z, const ComplexVector& xv,
                                  const SolverConfig& cfg) {
    cfg.validate();
    require_inside(domain, z, "z");
    if (xv.size() != domain.dim()) throw DomainError("vector has the wrong dimension");
    if (!(xv.norm() > 0.0)) throw DegenerateInput("metric needs a nonzero vector");

    const AffineBound seed = affine_metric_bound(domain, z, xv);
    const double eps = seed_shrink(seed.zeta_z, 0.0);
    DirFamily fam(z, xv, seed.zeta_z / (1.0 - eps), cfg.degree);
    Eigen::VectorXd x = Eigen::VectorXd::Zero(fam.size());
    x(0) = std::log(seed.disc.coeffs.row(1).norm() * (1.0 - eps) / xv.norm());

    GeodesicResult res;
    res.seed_value = seed.value;
    BarrierOutcome out;
    bool solved = false;
    try {
        out = BarrierSolver(domain, fam, cfg, fam.a()).run(x);
        solved = true;
    } catch (const NumericalFailure&) {
        solved = false;
    }
    const double value = solved ? std::exp(fam.objective(out.x)) : kInf;
    const bool feasible =
        solved && max_r_on(domain, AnalyticDisc(fam.coefficients(out.x)), 8 * cfg.grid, fam.a()) <= kFeasTol;
    if (solved && !feasible) out.converged = false;
    if (feasible && value <= seed.value) {
        res.disc = AnalyticDisc(fam.coefficients(out.x));
        res.zeta_z = fam.a();
        res.lambda = 1.0 / value;
        res.value = value;
        res.converged = out.converged;
    } else {
        res.disc = seed.disc;
        res.zeta_z = seed.zeta_z;
        res.value = seed.value;
        res.from_seed = true;
        res.converged = solved && out.converged;
    }
    res.lambda = 1.0 / res.value;
    res.alpha = res.value;
    res.disc.pre_center = res.zeta_z;
    res.disc.pre_rotation = 1.0;
    res.iterations = out.iterations;
    res.stage_values = out.stage_values;
    for (double& v : res.stage_values) v = std::exp(v);
    res.diam = disc_diameter(res.disc, cfg.grid);
    res.max_boundary_r = max_r_on(domain, res.disc, 8 * cfg.grid, res.zeta_z);
    res.residual = std::numeric_limits<double>::quiet_NaN();
    return res;
}

GeodesicResult solve_extremal_pair(const DomainSpec& domain, const ComplexPoint& z, const ComplexPoint& w,
                                   const SolverConfig& cfg) {
    cfg.validate();
    require_inside(domain, z, "z");
    require_inside(domain, w, "w");
    const double len = (w - z).norm();
    if (len == 0.0) throw DegenerateInput("solve_extremal_pair needs z != w");
    if (len < kDegeneratePair) {
        GeodesicResult res = solve_extremal_dir(domain, z, w - z, cfg);
        res.degenerate_pair = true;
        res.alpha = std::tanh(res.value);
        return res;
    }

    const AffineBound seed = affine_pair_bound(domain, z, w);
    const double eps = seed_shrink(seed.zeta_z, seed.zeta_w);
    const cplx a = seed.zeta_z / (1.0 - eps);
    const cplx pulled0 = mobius(-a, seed.zeta_w / (1.0 - eps));
    PairFamily fam(z, w, a, pulled0 / std::abs(pulled0), cfg.degree);
    Eigen::VectorXd x = Eigen::VectorXd::Zero(fam.size());
    x(0) = std::abs(pulled0);

    GeodesicResult res;
    res.seed_value = seed.value;
    BarrierOutcome out;
    bool solved = false;
    try {
        out = BarrierSolver(domain, fam, cfg, fam.a()).run(x);
        solved = true;
    } catch (const NumericalFailure&) {
        solved = false;
    }
    const double value = solved ? fam.objective(out.x) : kInf;
    const bool feasible =
        solved && max_r_on(domain, AnalyticDisc(fam.coefficients(out.x)), 8 * cfg.grid, fam.a()) <= kFeasTol;
    if (solved && !feasible) out.converged = false;
    if (feasible && value <= seed.value) {
        res.disc = AnalyticDisc(fam.coefficients(out.x));
        res.zeta_z = fam.a();
        res.zeta_w = fam.b_of(out.x);
        res.value = value;
        res.converged = out.converged;
    } else {
        res.disc = seed.disc;
        res.zeta_z = seed.zeta_z;
        res.zeta_w = seed.zeta_w;
        res.value = seed.value;
        res.from_seed = true;
        res.converged = solved && out.converged;
    }
    const cplx pulled = mobius(-res.zeta_z, res.zeta_w);
    res.alpha = std::abs(pulled);
    res.disc.pre_center = res.zeta_z;
    res.disc.pre_rotation = pulled / res.alpha;
    res.iterations = out.iterations;
    res.stage_values = out.stage_values;
    res.diam = disc_diameter(res.disc, cfg.grid);
    res.max_boundary_r = max_r_on(domain, res.disc, 8 * cfg.grid, res.zeta_z);
    res.residual = std::numeric_limits<double>::quiet_NaN();
    if (cfg.certify) {
        res.residual = geodesic_residual(domain, res.disc, cfg);
        res.converged = res.converged && res.residual < cfg.residual_threshold;
    }
    return res;
}

std::vector<cplx> interior_grid(int n_points, double max_radius) {
    const int rings = 4;
    const int per_ring = std::max(1, n_points / rings);
    std::vector<cplx> out;
    for (int k = 0; k < rings; ++k) {
        const double rad = max_radius * (k + 1) / rings;
        for (int l = 0; l < per_ring; ++l)
            out.push_back(std::polar(rad, 2.0 * std::numbers::pi * (l + 0.5 * k) / per_ring));
    }
    return out;
}

double geodesic_residual(const DomainSpec& domain, const AnalyticDisc& disc, const SolverConfig& cfg, int n_pairs) {
    if (disc_diameter(disc, 64) < 1e-12) throw DegenerateInput("geodesic residual is undefined for a constant disc");
    const SolverConfig inner = cfg.reduced();
    const auto grid = interior_grid();
    const int n = static_cast<int>(grid.size());
    const int pairs = std::min(n_pairs, n);
    double worst = 0.0;
    for (int i = 0; i < pairs; ++i) {
        // Spread the pairs over the grid when only a few are requested.
        const int a = (i * n) / pairs;
        const int b = (a + 13) % n;
        const cplx za = grid[a], zb = grid[b];
        const double kd = disc_distance(za, zb);
        try {
            auto res = solve_extremal_pair(domain, disc.poly(za), disc.poly(zb), inner);
            if (!res.converged && inner.grid < cfg.grid) {
                // Between-node bulges at the coarse grid; retry on the full one.
                SolverConfig fine = inner;
                fine.grid = cfg.grid;
                res = solve_extremal_pair(domain, disc.poly(za), disc.poly(zb), fine);
            }
            if (!res.converged) return kInf;
            worst = std::max(worst, std::abs(res.value - kd) / kd);
        } catch (const DomainError&) {
            return kInf;
        } catch (const NumericalFailure&) {
            return kInf;
        }
    }
    return worst;
}

PullbackRatio pullback_metric_ratio(const DomainSpec& domain, const AnalyticDisc& disc, const SolverConfig& cfg,
                                    int n_points) {
    PullbackRatio pr{kInf, -kInf};
    const auto grid = interior_grid();
    const int n = static_cast<int>(grid.size());
    const int count = std::min(n_points, n);
    for (int i = 0; i < count; ++i) {
        const cplx zeta = grid[(i * n) / count];
        const auto res = solve_extremal_dir(domain, disc.poly(zeta), disc.poly_derivative(zeta), cfg.reduced());
        const double ratio = res.value * (1.0 - std::norm(zeta));
        pr.min = std::min(pr.min, ratio);
        pr.max = std::max(pr.max, ratio);
    }
    return pr;
}

double halfplane_lower_bound(const DomainSpec& domain, const ComplexPoint& z, const ComplexPoint& w) {
    require_inside(domain, z, "z");
    require_inside(domain, w, "w");
    if ((z - w).norm() == 0.0) return 0.0;
    double lower = 0.0;
    bool any = false;
    for (const ComplexPoint* base : {&z, &w}) {
        try {
            const BoundaryFrame f = boundary_frame(domain, *base);
            const cplx a = hermitian(z - f.nearest, f.nu);
            const cplx b = hermitian(w - f.nearest, f.nu);
            lower = std::max(lower, halfplane_distance(a, b));
            any = true;
        } catch (const AmbiguityError&) {
        }
    }
    if (!any) throw AmbiguityError("no unambiguous supporting hyperplane at z or w");
    return lower;
}

Sandwich distance_sandwich(const DomainSpec& domain, const ComplexPoint& z, const ComplexPoint& w) {
    const double lower = halfplane_lower_bound(domain, z, w);
    if ((z - w).norm() == 0.0) return {0.0, 0.0};
    return {lower, affine_pair_bound(domain, z, w).value};
}

}  // namespace kobayashi
