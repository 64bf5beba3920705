#include "kobayashi/estimates.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <thread>

#include "kobayashi/ball_oracle.hpp"
#include "kobayashi/errors.hpp"
#include "kobayashi/geometry.hpp"

namespace kobayashi {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSandwichSlack = 1e-9;

BoundReport make_report(BoundId id, const PairMeta& m, const ComplexPoint& z, const ComplexPoint& w, double lhs,
                        double rhs, bool lower, double constant) {
    BoundReport r;
    r.id = id;
    r.z = z;
    r.w = w;
    r.lhs = lhs;
    r.rhs = rhs;
    r.margin = lower ? lhs - rhs : rhs - lhs;
    r.constant_used = constant;
    r.meta = m;
    return r;
}

double h_of(const PairMeta& m) { return std::sqrt(m.delta_z * m.delta_w); }

double combined_x(const PairMeta& m) {
    return (m.xn + m.dist * m.dist) / h_of(m) + m.dist / std::sqrt(m.delta_z) + m.dist / std::sqrt(m.delta_w);
}

bool c3_applicable(const PairMeta& m, double eps) { return m.xN >= eps * m.dist * (1.0 - 1e-9); }

ComplexVector random_tangent(std::mt19937_64& rng, const ComplexVector& nu) {
    std::normal_distribution<double> g;
    for (;;) {
        ComplexVector t(nu.size());
        for (Eigen::Index j = 0; j < t.size(); ++j) t(j) = {g(rng), g(rng)};
        t -= hermitian(t, nu) * nu;
        const double n = t.norm();
        if (n > 1e-6) return t / n;
    }
}

ComplexPoint default_base(const CampaignConfig& cfg) {
    const int d = cfg.domain.dim();
    ComplexPoint dir = cfg.base.size() == d ? cfg.base : ComplexPoint(ComplexPoint::Unit(d, 0));
    return ray_boundary(cfg.domain, ComplexPoint::Zero(d), dir);
}

void sample_pair(const CampaignConfig& cfg, const ComplexPoint& p, Sample& s) {
    const DomainSpec& dom = cfg.domain;
    std::seed_seq seq{static_cast<std::uint64_t>(cfg.seed), static_cast<std::uint64_t>(s.decade),
                      static_cast<std::uint64_t>(s.index)};
    std::mt19937_64 rng(seq);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double delta = s.delta_target;

    const ComplexVector dr = dom.dr(p);
    const ComplexVector nu_p = dr.conjugate() / dr.norm();
    s.z = p - delta * nu_p + (unif(rng) * delta) * random_tangent(rng, nu_p);
    if (!dom.contains(s.z)) throw NumericalFailure("sampled z is outside the domain");

    const BoundaryFrame fz = boundary_frame(dom, s.z);
    const double theta = std::numbers::pi * (0.5 + unif(rng));  // inward real normal part
    const ComplexVector dir = (cfg.eps * std::polar(1.0, theta)) * fz.nu +
                              std::sqrt(std::max(0.0, 1.0 - cfg.eps * cfg.eps)) * random_tangent(rng, fz.nu);
    double len = (0.2 + 0.8 * unif(rng)) * 0.5 * std::sqrt(delta);
    for (int tries = 0; tries < 40; ++tries, len *= 0.5) {
        s.w = s.z + len * dir;
        if (dom.contains(s.w) && boundary_distance(dom, s.w) >= 0.25 * delta) return;
    }
    throw NumericalFailure("could not place w inside the domain");
}

void evaluate_sample(const CampaignConfig& cfg, const ComplexPoint& p, Sample& s) {
    const DomainSpec& dom = cfg.domain;
    sample_pair(cfg, p, s);
    s.meta = pair_meta(dom, s.z, s.w);
    s.lower = halfplane_lower_bound(dom, s.z, s.w);
    AnalyticDisc disc;
    if (cfg.use_oracle) {
        const auto k = oracle_distance(dom, s.z, s.w);
        const auto g = oracle_geodesic(dom, s.z, s.w);
        if (!k || !g) throw UnsupportedDomain("no closed-form oracle for this domain");
        s.k = *k;
        s.upper = *k;
        s.converged = true;
        s.provenance = "oracle";
        disc = *g;
    } else {
        const GeodesicResult res = solve_extremal_pair(dom, s.z, s.w, cfg.solver);
        s.converged = res.converged;
        s.from_seed = res.from_seed;
        s.upper = res.seed_value;
        s.meta.residual = res.residual;
        disc = res.disc;
        const bool certified = std::isnan(res.residual) || res.residual < cfg.solver.residual_threshold;
        if (res.converged && certified) {
            s.k = res.value;
            s.provenance = "solver";
        } else if (const auto k = oracle_distance(dom, s.z, s.w)) {
            s.k = *k;
            s.provenance = "oracle";
        } else {
            throw NumericalFailure("solver did not converge and no oracle is available");
        }
    }
    s.profile = geodesic_profile(dom, disc);
    s.meta.diam = s.profile.diam;
    s.meta.depth = s.profile.max_sqrt_delta * s.profile.max_sqrt_delta;
    s.ok = true;
}

int thread_count(const CampaignConfig& cfg, int tasks) {
    int n = cfg.threads;
    if (n <= 0) {
        if (const char* env = std::getenv("LEMPERT_THREADS")) n = std::atoi(env);
    }
    if (n <= 0) n = static_cast<int>(std::thread::hardware_concurrency());
    return std::clamp(n, 1, std::max(1, tasks));
}

template <class F>
void update_min(Fitted& f, double v, int i, F better) {
    if (std::isfinite(v) && (f.witness < 0 || better(v, f.value))) {
        f.value = v;
        f.witness = i;
    }
}

nlohmann::json fitted_json(const Fitted& f) {
    return {{"value", f.witness >= 0 ? nlohmann::json(f.value) : nlohmann::json()}, {"witness", f.witness}};
}

std::string fmt(double v) {
    if (std::isnan(v)) return "";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

std::string bound_name(BoundId id) {
    switch (id) {
        case BoundId::NA: return "NA";
        case BoundId::NT: return "NT";
        case BoundId::BB_LOWER: return "BB_LOWER";
        case BoundId::BB_UPPER: return "BB_UPPER";
        case BoundId::C2: return "C2";
        case BoundId::C3: return "C3";
        case BoundId::COMBINED: return "COMBINED";
        case BoundId::THGEN: return "THGEN";
        case BoundId::D1: return "D1";
        case BoundId::D2: return "D2";
        case BoundId::CRU: return "CRU";
    }
    return "?";
}

PairMeta pair_meta(const DomainSpec& domain, const ComplexPoint& z, const ComplexPoint& w) {
    PairMeta m;
    const BoundaryFrame fz = boundary_frame(domain, z);
    const BoundaryFrame fw = boundary_frame(domain, w);
    if (!(fz.sdist < 0.0) || !(fw.sdist < 0.0)) throw DomainError("points must lie inside the domain");
    m.delta_z = -fz.sdist;
    m.delta_w = -fw.sdist;
    m.dist = (z - w).norm();
    const NormalSplit sz = normal_split(fz, z - w);
    m.xn = sz.xn_abs;
    m.xN = sz.xN_abs;
    m.xN_w = normal_split(fw, z - w).xN_abs;
    m.eps = m.dist > 0.0 ? m.xN / m.dist : 0.0;
    return m;
}

double s_function(double x) {
    if (!(x > 0.0)) throw DomainError("s(x) needs x > 0");
    return -std::sqrt(x) * std::log(x);
}

double max_average_gap(double x1, double x2) {
    if (!(x1 >= 0.0) || !(x2 >= 0.0)) throw DomainError("max/average inequality needs x1, x2 >= 0");
    return std::max(std::log1p(x1), std::log1p(x2)) - std::log1p(0.5 * (x1 + x2));
}

GeodesicProfile geodesic_profile(const DomainSpec& domain, const AnalyticDisc& disc) {
    GeodesicProfile g;
    g.diam = disc_diameter(disc, 128);
    std::vector<cplx> grid = interior_grid();
    grid.insert(grid.begin(), cplx(0.0));
    g.max_s = -kInf;
    for (cplx s : grid) {
        const ComplexPoint q = disc.poly(s);
        const ComplexVector dq = disc.poly_derivative(s);
        double delta = 0.0, ratio = 1.0;
        try {
            const BoundaryFrame f = boundary_frame(domain, q);
            delta = -f.sdist;
            if (dq.norm() > 0.0) ratio = normal_split(f, dq).xN_abs / dq.norm();
        } catch (const AmbiguityError&) {
            // Several nearest points: keep the depth, bound the direction ratio by 1.
            delta = -signed_distance(domain, q);
        }
        if (!(delta > 0.0)) throw DomainError("geodesic leaves the domain");
        g.max_sqrt_delta = std::max(g.max_sqrt_delta, std::sqrt(delta));
        g.max_s = std::max(g.max_s, s_function(delta));
        g.d1_q = std::max(g.d1_q, std::sqrt(delta) + ratio);
        g.max_derivative = std::max(g.max_derivative, dq.norm());
    }
    return g;
}

BoundReport bound_upper_na(const PairMeta& m, const ComplexPoint& z, const ComplexPoint& w, double k) {
    const double rhs = m.dist > 0.0 ? std::log1p(2.0 * m.dist / h_of(m)) : 0.0;
    return make_report(BoundId::NA, m, z, w, k, rhs, false, 2.0);
}

BoundReport bound_lower_nt(const PairMeta& m, const ComplexPoint& z, const ComplexPoint& w, double k, double c) {
    const double rhs = std::log1p(c * m.dist / std::sqrt(m.delta_z)) + std::log1p(c * m.dist / std::sqrt(m.delta_w));
    return make_report(BoundId::NT, m, z, w, k, rhs, true, c);
}

std::pair<BoundReport, BoundReport> bound_band_bb(const PairMeta& m, const ComplexPoint& z, const ComplexPoint& w,
                                                  double k, double big_c) {
    const double h = h_of(m);
    return {make_report(BoundId::BB_LOWER, m, z, w, k, std::log1p(m.dist * m.dist / h) - big_c, true, big_c),
            make_report(BoundId::BB_UPPER, m, z, w, k, std::log1p(m.dist / h) + big_c, false, big_c)};
}

BoundReport bound_lower_c2(const PairMeta& m, const ComplexPoint& z, const ComplexPoint& w, double k, double c) {
    return make_report(BoundId::C2, m, z, w, k, std::log1p(c * m.xn / h_of(m)), true, c);
}

BoundReport bound_lower_c3(const PairMeta& m, const ComplexPoint& z, const ComplexPoint& w, double k, double c,
                           double eps) {
    BoundReport r = make_report(BoundId::C3, m, z, w, k, std::log1p(c * m.xN / h_of(m)), true, c);
    r.applicable = c3_applicable(m, eps);
    return r;
}

BoundReport combined_lower(const PairMeta& m, const ComplexPoint& z, const ComplexPoint& w, double k, double c) {
    const double rhs = m.dist > 0.0 ? std::log1p(c * combined_x(m)) : 0.0;
    return make_report(BoundId::COMBINED, m, z, w, k, rhs, true, c);
}

BoundReport thmgen_ratio(const PairMeta& m, const ComplexPoint& z, const ComplexPoint& w, double big_c) {
    return make_report(BoundId::THGEN, m, z, w, m.xN, big_c * m.dist * m.diam, false, big_c);
}

std::pair<BoundReport, BoundReport> diam_bounds(const PairMeta& m, const GeodesicProfile& g, const ComplexPoint& z,
                                                const ComplexPoint& w, double c, double big_c) {
    return {make_report(BoundId::D1, m, z, w, g.diam, c * g.d1_q, true, c),
            make_report(BoundId::D2, m, z, w, g.diam, big_c * g.max_s, false, big_c)};
}

ConjectureProbe conjecture_probe(const GeodesicProfile& g) {
    ConjectureProbe p;
    p.diam = g.diam;
    p.sqrt_depth = g.max_sqrt_delta;
    p.max_derivative = g.max_derivative;
    p.diam_over_depth = g.diam / g.max_sqrt_delta;
    p.diam_over_derivative = g.diam / g.max_derivative;
    p.depth_over_derivative = g.max_sqrt_delta / g.max_derivative;
    return p;
}

std::optional<double> oracle_distance(const DomainSpec& domain, const ComplexPoint& z, const ComplexPoint& w) {
    if (!domain.is_balanced()) return std::nullopt;
    ComplexPoint a = z, b = w;
    for (int j = 0; j < domain.dim(); ++j) {
        const double s = std::sqrt(domain.axes()[j]);
        a(j) *= s;
        b(j) *= s;
    }
    return ball_distance(a, b);
}

std::optional<AnalyticDisc> oracle_geodesic(const DomainSpec& domain, const ComplexPoint& z, const ComplexPoint& w) {
    if (!domain.is_balanced()) return std::nullopt;
    Eigen::VectorXd s(domain.dim());
    for (int j = 0; j < domain.dim(); ++j) s(j) = std::sqrt(domain.axes()[j]);
    const ComplexVector sc = s.cast<cplx>();
    AnalyticDisc d = ball_geodesic(z.cwiseProduct(sc), w.cwiseProduct(sc)).disc;
    d.coeffs = d.coeffs * s.cwiseInverse().cast<cplx>().asDiagonal();
    return d;
}

void CampaignConfig::validate() const {
    for (size_t i = 0; i < decades.size(); ++i) {
        if (!(decades[i] > 0.0) || !(decades[i] < 0.2)) throw PreconditionError("decades must lie in (0, 0.2)");
        if (i > 0 && !(decades[i] < decades[i - 1])) throw PreconditionError("decades must be decreasing");
    }
    if (!(eps >= 0.0 && eps <= 1.0)) throw PreconditionError("eps must lie in [0, 1]");
    if (pairs < 0) throw PreconditionError("pairs must be nonnegative");
    if (base.size() != 0 && base.size() != domain.dim()) throw PreconditionError("base point has the wrong dimension");
    solver.validate();
}

nlohmann::json CampaignConfig::to_json() const {
    nlohmann::json j;
    j["domain"] = domain.to_json();
    j["base"] = base.size() ? vector_json(base) : nlohmann::json();
    j["decades"] = decades;
    j["eps"] = eps;
    j["pairs"] = pairs;
    j["seed"] = seed;
    j["solver"] = solver.to_json();
    j["use_oracle"] = use_oracle;
    return j;
}

nlohmann::json Constants::to_json() const {
    return {{"nt_c", fitted_json(nt_c)},           {"bb_C", fitted_json(bb_C)},     {"c2_c", fitted_json(c2_c)},
            {"c3_c", fitted_json(c3_c)},           {"combined_c", fitted_json(combined_c)},
            {"thgen_C", fitted_json(thgen_C)},     {"d1_c", fitted_json(d1_c)},     {"d2_c", fitted_json(d2_c)},
            {"d2_C", fitted_json(d2_C)},           {"depth", fitted_json(depth)},   {"used", used}};
}

Constants fit_constants(const std::vector<Sample>& samples, double eps) {
    Constants c;
    auto less = [](double a, double b) { return a < b; };
    auto more = [](double a, double b) { return a > b; };
    for (size_t idx = 0; idx < samples.size(); ++idx) {
        const Sample& s = samples[idx];
        if (!s.ok) continue;
        const int i = static_cast<int>(idx);
        const PairMeta& m = s.meta;
        ++c.used;
        const double e = std::expm1(s.k), h = h_of(m);
        if (m.dist > 0.0) {
            const double a1 = m.dist / std::sqrt(m.delta_z), a2 = m.dist / std::sqrt(m.delta_w);
            // (1 + c a1)(1 + c a2) = e^k
            update_min(c.nt_c, 2.0 * e / ((a1 + a2) + std::sqrt((a1 + a2) * (a1 + a2) + 4.0 * a1 * a2 * e)), i, less);
            update_min(c.combined_c, e / combined_x(m), i, less);
        }
        const double bb = std::max(std::log1p(m.dist * m.dist / h) - s.k, s.k - std::log1p(m.dist / h));
        update_min(c.bb_C, std::max(bb, 0.0), i, more);
        if (m.xn > 0.0) update_min(c.c2_c, e * h / m.xn, i, less);
        if (m.xN > 0.0 && c3_applicable(m, eps)) update_min(c.c3_c, e * h / m.xN, i, less);
        if (m.diam > 0.0 && m.dist > 0.0) update_min(c.thgen_C, m.xN / (m.dist * m.diam), i, more);
        const GeodesicProfile& g = s.profile;
        if (g.d1_q > 0.0) update_min(c.d1_c, g.diam / g.d1_q, i, less);
        if (g.max_sqrt_delta > 0.0) update_min(c.d2_c, g.diam / g.max_sqrt_delta, i, less);
        if (g.max_s > 0.0) update_min(c.d2_C, g.diam / g.max_s, i, more);
        update_min(c.depth, m.depth, i, less);
    }
    return c;
}

std::vector<BoundReport> bound_reports(const std::vector<Sample>& samples, const Constants& c, double eps) {
    std::vector<BoundReport> out;
    for (const Sample& s : samples) {
        if (!s.ok) continue;
        const PairMeta& m = s.meta;
        std::vector<BoundReport> rows;
        rows.push_back(bound_upper_na(m, s.z, s.w, s.k));
        rows.push_back(bound_lower_nt(m, s.z, s.w, s.k, c.nt_c.value));
        const auto bb = bound_band_bb(m, s.z, s.w, s.k, c.bb_C.value);
        rows.push_back(bb.first);
        rows.push_back(bb.second);
        rows.push_back(bound_lower_c2(m, s.z, s.w, s.k, c.c2_c.value));
        rows.push_back(bound_lower_c3(m, s.z, s.w, s.k, c.c3_c.value, eps));
        rows.push_back(combined_lower(m, s.z, s.w, s.k, c.combined_c.value));
        rows.push_back(thmgen_ratio(m, s.z, s.w, c.thgen_C.value));
        const auto db = diam_bounds(m, s.profile, s.z, s.w, c.d1_c.value, c.d2_C.value);
        rows.push_back(db.first);
        rows.push_back(db.second);
        const ConjectureProbe cp = conjecture_probe(s.profile);
        BoundReport cru = make_report(BoundId::CRU, m, s.z, s.w, cp.diam, cp.sqrt_depth, true, cp.max_derivative);
        cru.margin = cp.diam_over_depth;
        rows.push_back(cru);
        for (auto& r : rows) {
            r.converged = s.converged;
            out.push_back(std::move(r));
        }
    }
    return out;
}

double CampaignReport::failure_fraction() const {
    return samples.empty() ? 0.0 : static_cast<double>(failures) / static_cast<double>(samples.size());
}

bool CampaignReport::passed() const { return sandwich_violations == 0 && failure_fraction() <= 0.1; }

CampaignReport run_campaign(const CampaignConfig& cfg) {
    cfg.validate();
    CampaignReport rep;
    rep.cfg = cfg;
    const int nd = static_cast<int>(cfg.decades.size());
    for (int di = 0; di < nd; ++di)
        for (int i = 0; i < cfg.pairs; ++i) {
            Sample s;
            s.decade = di;
            s.index = i;
            s.delta_target = cfg.decades[di];
            rep.samples.push_back(std::move(s));
        }
    const ComplexPoint p = rep.samples.empty() ? ComplexPoint() : default_base(cfg);

    std::atomic<size_t> next{0};
    auto work = [&] {
        for (size_t k; (k = next.fetch_add(1)) < rep.samples.size();) {
            Sample& s = rep.samples[k];
            try {
                evaluate_sample(cfg, p, s);
            } catch (const std::exception& e) {
                s.ok = false;
                s.error = e.what();
            }
        }
    };
    const int nt = thread_count(cfg, static_cast<int>(rep.samples.size()));
    std::vector<std::thread> pool;
    for (int t = 1; t < nt; ++t) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();

    for (const Sample& s : rep.samples) {
        if (!s.ok) {
            ++rep.failures;
            continue;
        }
        if (!s.converged) continue;
        const double na = bound_upper_na(s.meta, s.z, s.w, s.k).rhs;
        if (!(s.lower <= s.k + kSandwichSlack) || !(s.k <= s.upper + kSandwichSlack) || !(s.k <= na))
            ++rep.sandwich_violations;
    }
    rep.fitted = fit_constants(rep.samples, cfg.eps);
    for (int di = 0; di < nd; ++di) {
        std::vector<Sample> part;
        for (const Sample& s : rep.samples)
            if (s.decade == di) part.push_back(s);
        rep.per_decade.push_back(fit_constants(part, cfg.eps));
    }
    rep.reports = bound_reports(rep.samples, rep.fitted, cfg.eps);
    return rep;
}

nlohmann::json CampaignReport::summary() const {
    nlohmann::json j;
    j["config"] = cfg.to_json();
    j["seed"] = cfg.seed;
    j["samples"] = samples.size();
    j["failures"] = failures;
    j["failure_fraction"] = failure_fraction();
    j["sandwich_violations"] = sandwich_violations;
    j["passed"] = passed();
    j["fitted"] = fitted.to_json();
    nlohmann::json pd = nlohmann::json::array();
    for (size_t di = 0; di < per_decade.size(); ++di) {
        nlohmann::json e = per_decade[di].to_json();
        e["delta"] = cfg.decades[di];
        pd.push_back(e);
    }
    j["per_decade"] = pd;
    if (cfg.eps > 0.0 && cfg.eps < 0.5 && fitted.c3_c.witness >= 0) {
        const double shape = -cfg.eps / std::pow(std::log(cfg.eps), 2);
        j["c3_over_shape"] = fitted.c3_c.value / shape;
    }
    nlohmann::json fails = nlohmann::json::array();
    for (const Sample& s : samples)
        if (!s.ok) fails.push_back({{"decade", s.decade}, {"index", s.index}, {"error", s.error}});
    j["failed_samples"] = fails;
    int holds = 0, applicable = 0;
    for (const auto& r : reports) {
        if (r.id == BoundId::CRU || !r.applicable) continue;
        ++applicable;
        if (r.holds()) ++holds;
    }
    j["rows_holding"] = holds;
    j["rows_asserted"] = applicable;
    return j;
}

std::string csv_header(int d) {
    std::ostringstream h;
    h << "bound_id";
    for (const char* p : {"z", "w"})
        for (int j = 1; j <= d; ++j) h << ',' << p << j << "_re," << p << j << "_im";
    h << ",lhs,rhs,margin,constant_used,delta_z,delta_w,dist_zw,xn,xN,eps,diam,residual,converged,applicable,xN_w,"
         "depth\n";
    return h.str();
}

std::string CampaignReport::csv() const {
    std::ostringstream o;
    o << csv_header(cfg.domain.dim());
    for (const auto& r : reports) {
        o << bound_name(r.id);
        for (const ComplexPoint* p : {&r.z, &r.w})
            for (Eigen::Index j = 0; j < p->size(); ++j) o << ',' << fmt((*p)(j).real()) << ',' << fmt((*p)(j).imag());
        const PairMeta& m = r.meta;
        for (double v : {r.lhs, r.rhs, r.margin, r.constant_used, m.delta_z, m.delta_w, m.dist, m.xn, m.xN, m.eps,
                         m.diam, m.residual})
            o << ',' << fmt(v);
        o << ',' << (r.converged ? 1 : 0) << ',' << (r.applicable ? 1 : 0) << ',' << fmt(m.xN_w) << ','
          << fmt(m.depth) << '\n';
    }
    return o.str();
}

void write_atomic(const std::string& path, const std::string& contents) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot open " + tmp.string() + " for writing");
        out << contents;
        out.flush();
        if (!out) throw Error("write to " + tmp.string() + " failed");
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp);
        throw Error("cannot rename into " + target.string() + ": " + ec.message());
    }
}

}  // namespace kobayashi
