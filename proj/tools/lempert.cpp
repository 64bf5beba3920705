// Command-line front end: single computations, normal forms and campaigns.
// stdout carries one JSON document; human-readable notes go to stderr.
// Exit codes: 0 success, 1 input error, 2 flagged non-convergence or failed checks.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "kobayashi/errors.hpp"
#include "kobayashi/estimates.hpp"
#include "kobayashi/geometry.hpp"
#include "kobayashi/lempert.hpp"
#include "kobayashi/literals.hpp"
#include "kobayashi/scaling.hpp"

using namespace kobayashi;
using nlohmann::json;

namespace {

constexpr int kOk = 0;
constexpr int kInputError = 1;
constexpr int kFlagged = 2;

struct Options {
    std::string domain_file;
    std::string z, w, x;
    int degree = 16, grid = 128, pairs = 30;
    double tol = 1e-10, eps = 0.5;
    std::uint64_t seed = 1;
    std::vector<double> decades{1e-2, 1e-3, 1e-4};
    std::string out = ".";
    std::string format = "csv";
    bool certify = true;
    bool oracle = false;
};

DomainSpec load_domain(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot read domain file '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ParseError("domain file '" + path + "' is not valid JSON: " + e.what());
    }
    return DomainSpec::from_json(j);
}

SolverConfig solver_config(const Options& o) {
    SolverConfig c;
    c.degree = o.degree;
    c.grid = o.grid;
    c.tol = o.tol;
    c.validate();
    return c;
}

void emit(const json& j) { std::cout << j.dump(2) << '\n'; }

void note(const std::string& s) { std::cerr << s << '\n'; }

std::string fixed6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

int cmd_distance(const Options& o) {
    const DomainSpec dom = load_domain(o.domain_file);
    const ComplexPoint z = parse_point(o.z, dom.dim()), w = parse_point(o.w, dom.dim());
    SolverConfig cfg = solver_config(o);
    cfg.certify = o.certify;
    json j;
    if ((z - w).norm() == 0.0) {
        if (!dom.contains(z)) throw DomainError("z is not inside the domain");
        j = {{"value", 0.0}, {"lower", 0.0}, {"upper", 0.0}, {"residual", nullptr}, {"converged", true}};
        note("k_D = " + fixed6(0.0));
        emit(j);
        return kOk;
    }
    const GeodesicResult res = solve_extremal_pair(dom, z, w, cfg);
    const double lower = halfplane_lower_bound(dom, z, w);
    j = {{"value", res.value}, {"lower", lower}, {"upper", res.seed_value}, {"converged", res.converged},
         {"residual", std::isfinite(res.residual) ? json(res.residual) : json(nullptr)}, {"result", res.to_json()}};
    note("k_D = " + fixed6(res.value) + "  sandwich [" + fixed6(lower) + ", " + fixed6(res.seed_value) + "]");
    emit(j);
    return res.converged ? kOk : kFlagged;
}

int cmd_metric(const Options& o) {
    const DomainSpec dom = load_domain(o.domain_file);
    const ComplexPoint z = parse_point(o.z, dom.dim());
    const ComplexVector x = parse_point(o.x, dom.dim());
    const GeodesicResult res = solve_extremal_dir(dom, z, x, solver_config(o));
    note("kappa_D = " + fixed6(res.value));
    emit({{"value", res.value}, {"upper", res.seed_value}, {"converged", res.converged}, {"result", res.to_json()}});
    return res.converged ? kOk : kFlagged;
}

int cmd_geodesic(const Options& o) {
    const DomainSpec dom = load_domain(o.domain_file);
    const ComplexPoint z = parse_point(o.z, dom.dim()), w = parse_point(o.w, dom.dim());
    SolverConfig cfg = solver_config(o);
    cfg.certify = o.certify;
    const GeodesicResult res = solve_extremal_pair(dom, z, w, cfg);
    emit(res.to_json());
    return res.converged ? kOk : kFlagged;
}

int cmd_scale(const Options& o) {
    const DomainSpec dom = load_domain(o.domain_file);
    const ComplexPoint z = parse_point(o.z, dom.dim()), w = parse_point(o.w, dom.dim());
    if ((z - w).norm() == 0.0) throw DegenerateInput("scale needs z != w");
    const SolverConfig cfg = solver_config(o);
    const NormalizedBoundary nb = normalize_boundary(dom, z);
    const GeodesicResult res = solve_extremal_pair(dom, z, w, cfg);
    const AnalyticDisc nd = normalize_disc(nb.map, res.disc);

    json j;
    j["map"] = nb.map.to_json();
    j["geodesic"] = {{"value", res.value}, {"converged", res.converged}};
    int code = res.converged ? kOk : kFlagged;
    try {
        ScalingParams sp = choose_t(nd, cfg.grid);
        sp.gamma = nb.params.gamma;
        j["params"] = sp.to_json();
        const TransportedDisc td = transport_disc(sp.t, nd, cfg.grid, 2 * nd.degree());
        double min_re = std::numeric_limits<double>::infinity();
        for (const auto& q : nd.boundary_samples(4 * cfg.grid))
            min_re = std::min(min_re, cayley_At_inverse(sp.t, q)(0).real());
        j["touching_residual"] = std::abs(min_re);
        j["transport_residual"] = td.residual;
        const ComplexPoint xz = cayley_At_inverse(sp.t, nb.map.to_normal(z));
        const ComplexPoint yw = cayley_At_inverse(sp.t, nb.map.to_normal(w));
        try {
            const TangentialRatio tr = tangential_ratio(sp.t, xz, yw);
            j["tangential_ratio"] = tr.ratio;
            j["sqrt_factor"] = tr.sqrt_factor;
        } catch (const DegenerateInput& e) {
            j["tangential_ratio"] = nullptr;
            j["tangential_error"] = e.what();
        }
        note("t = " + std::to_string(sp.t));
    } catch (const PreconditionError& e) {
        // The disc leaves {Re z_1 > 0} in normal coordinates, or t = 1.
        j["params"] = ScalingParams{0.0, 1.0, nb.params.gamma, 0.0}.to_json();
        j["params"]["t"] = nullptr;
        j["choose_t_error"] = e.what();
        code = kFlagged;
    }
    emit(j);
    return code;
}

int cmd_probe(const Options& o) {
    const DomainSpec dom = load_domain(o.domain_file);
    const ComplexPoint z = parse_point(o.z, dom.dim()), w = parse_point(o.w, dom.dim());
    if ((z - w).norm() == 0.0) throw DegenerateInput("probe needs z != w");
    const GeodesicResult res = solve_extremal_pair(dom, z, w, solver_config(o));
    PairMeta m = pair_meta(dom, z, w);
    const GeodesicProfile g = geodesic_profile(dom, res.disc);
    m.diam = g.diam;
    m.depth = g.max_sqrt_delta * g.max_sqrt_delta;
    const ConjectureProbe cp = conjecture_probe(g);
    json j;
    j["value"] = res.value;
    j["converged"] = res.converged;
    j["lower"] = halfplane_lower_bound(dom, z, w);
    j["upper"] = res.seed_value;
    j["na_rhs"] = bound_upper_na(m, z, w, res.value).rhs;
    j["meta"] = {{"delta_z", m.delta_z}, {"delta_w", m.delta_w}, {"dist", m.dist}, {"xn", m.xn},
                 {"xN", m.xN},           {"xN_w", m.xN_w},       {"eps", m.eps},   {"diam", m.diam},
                 {"depth", m.depth}};
    j["thgen_ratio"] = m.dist > 0.0 && m.diam > 0.0 ? json(m.xN / (m.dist * m.diam)) : json(nullptr);
    j["conjecture"] = {{"diam", cp.diam},
                       {"sqrt_depth", cp.sqrt_depth},
                       {"max_derivative", cp.max_derivative},
                       {"diam_over_depth", cp.diam_over_depth},
                       {"diam_over_derivative", cp.diam_over_derivative},
                       {"depth_over_derivative", cp.depth_over_derivative}};
    emit(j);
    return res.converged ? kOk : kFlagged;
}

json reports_json(const CampaignReport& rep) {
    json rows = json::array();
    for (const auto& r : rep.reports) {
        rows.push_back({{"bound_id", bound_name(r.id)},
                        {"z", vector_json(r.z)},
                        {"w", vector_json(r.w)},
                        {"lhs", r.lhs},
                        {"rhs", r.rhs},
                        {"margin", r.margin},
                        {"constant_used", r.constant_used},
                        {"applicable", r.applicable},
                        {"converged", r.converged},
                        {"delta_z", r.meta.delta_z},
                        {"delta_w", r.meta.delta_w},
                        {"dist_zw", r.meta.dist},
                        {"xn", r.meta.xn},
                        {"xN", r.meta.xN},
                        {"xN_w", r.meta.xN_w},
                        {"eps", r.meta.eps},
                        {"diam", r.meta.diam},
                        {"depth", r.meta.depth},
                        {"residual", std::isfinite(r.meta.residual) ? json(r.meta.residual) : json(nullptr)}});
    }
    return rows;
}

int cmd_verify(const Options& o) {
    CampaignConfig cfg;
    cfg.domain = load_domain(o.domain_file);
    cfg.decades = o.decades;
    cfg.eps = o.eps;
    cfg.pairs = o.pairs;
    cfg.seed = o.seed;
    cfg.solver = solver_config(o);
    cfg.use_oracle = o.oracle;
    if (!o.z.empty()) cfg.base = parse_point(o.z, cfg.domain.dim());
    cfg.validate();
    namespace fs = std::filesystem;
    if (!fs::is_directory(o.out)) throw ParseError("--out must be an existing directory: '" + o.out + "'");

    const CampaignReport rep = run_campaign(cfg);
    const fs::path dir(o.out);
    if (o.format == "csv") write_atomic((dir / "campaign.csv").string(), rep.csv());
    else write_atomic((dir / "campaign.json").string(), reports_json(rep).dump(1) + "\n");
    const json summary = rep.summary();
    write_atomic((dir / "summary.json").string(), summary.dump(2) + "\n");
    emit(summary);
    return rep.passed() ? kOk : kFlagged;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Kobayashi distance and extremal discs on convex domains"};
    app.require_subcommand(1);
    Options o;

    auto add_solver = [&](CLI::App* c) {
        c->add_option("--degree", o.degree, "Taylor degree of the disc")->check(CLI::Range(1, 64));
        c->add_option("--grid", o.grid, "boundary constraint nodes")->check(CLI::Range(8, 4096));
        c->add_option("--tol", o.tol, "Newton decrement tolerance")->check(CLI::PositiveNumber);
    };
    auto add_domain = [&](CLI::App* c) { c->add_option("domain", o.domain_file, "domain JSON file")->required(); };

    auto* dist = app.add_subcommand("distance", "Lempert function k_D(z, w) with a lower/upper sandwich");
    add_domain(dist);
    dist->add_option("z", o.z, "point, e.g. 0.5,0.1-0.2i")->required();
    dist->add_option("w", o.w, "point")->required();
    dist->add_flag("!--no-certify", o.certify, "skip the geodesic residual");
    add_solver(dist);

    auto* met = app.add_subcommand("metric", "Kobayashi metric kappa_D(z; X)");
    add_domain(met);
    met->add_option("z", o.z, "point")->required();
    met->add_option("x", o.x, "tangent vector")->required();
    add_solver(met);

    auto* geo = app.add_subcommand("geodesic", "extremal disc through z and w as JSON");
    add_domain(geo);
    geo->add_option("z", o.z, "point")->required();
    geo->add_option("w", o.w, "point")->required();
    geo->add_flag("!--no-certify", o.certify, "skip the geodesic residual");
    add_solver(geo);

    auto* sc = app.add_subcommand("scale", "normal form at z, touching parameter t and tangential ratio");
    add_domain(sc);
    sc->add_option("z", o.z, "point near the boundary")->required();
    sc->add_option("w", o.w, "second point")->required();
    add_solver(sc);

    auto* ver = app.add_subcommand("verify", "run an estimate campaign and write CSV + JSON summary");
    add_domain(ver);
    ver->add_option("--seed", o.seed, "RNG seed");
    ver->add_option("--eps", o.eps, "nontangentiality of the sampled pairs")->check(CLI::Range(0.0, 1.0));
    ver->add_option("--decades", o.decades, "boundary distances, decreasing")->delimiter(',');
    ver->add_option("--pairs", o.pairs, "pairs per decade")->check(CLI::NonNegativeNumber);
    ver->add_option("--out", o.out, "output directory");
    ver->add_option("--format", o.format, "report format")->check(CLI::IsMember({"csv", "json"}));
    ver->add_option("--base", o.z, "boundary direction of the sampled pairs (default e_1)");
    ver->add_flag("--oracle", o.oracle, "closed-form distances and geodesics (ball, ellipsoid)");
    add_solver(ver);

    auto* pr = app.add_subcommand("probe", "pair metadata, geodesic profile and conjecture ratios");
    add_domain(pr);
    pr->add_option("z", o.z, "point")->required();
    pr->add_option("w", o.w, "point")->required();
    add_solver(pr);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kInputError;
    }

    try {
        if (*dist) return cmd_distance(o);
        if (*met) return cmd_metric(o);
        if (*geo) return cmd_geodesic(o);
        if (*sc) return cmd_scale(o);
        if (*ver) return cmd_verify(o);
        if (*pr) return cmd_probe(o);
    } catch (const NumericalFailure& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kFlagged;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInputError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInputError;
    }
    return kInputError;
}
