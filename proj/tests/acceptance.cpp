// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "kobayashi/ball_oracle.hpp"
#include "kobayashi/estimates.hpp"
#include "kobayashi/lempert.hpp"
#include "kobayashi/scaling.hpp"

using namespace kobayashi;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int failures = 0;

void report(int id, const std::string& name, bool ok, const std::string& detail) {
    std::printf("[%s] %2d %s: %s\n", ok ? "PASS" : "FAIL", id, name.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

std::string fmt(const char* f, double a) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

ComplexPoint random_in_ball(std::mt19937_64& rng, int d, double radius) {
    std::normal_distribution<double> g;
    std::uniform_real_distribution<double> u(0.0, 1.0);
    ComplexPoint p(d);
    for (int i = 0; i < d; ++i) p(i) = {g(rng), g(rng)};
    p.normalize();
    return p * (radius * std::pow(u(rng), 1.0 / (2.0 * d)));
}

double spread(const std::vector<double>& v) {
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return *hi / *lo;
}

struct Certified {
    const DomainSpec* domain;
    AnalyticDisc disc;
    bool converged;
};

// Criteria 1 and 2 keep their solved discs for criterion 3.
std::vector<Certified> solved;

void criterion_1() {
    std::mt19937_64 rng(20240601);
    const auto t0 = Clock::now();
    double worst = 0.0;
    int bad = 0;
    static const DomainSpec kBall = DomainSpec::ball(2);
    for (int i = 0; i < 20; ++i) {
        const ComplexPoint z = random_in_ball(rng, 2, 0.999), w = random_in_ball(rng, 2, 0.999);
        const double truth = ball_distance(z, w);
        const GeodesicResult r = solve_extremal_pair(kBall, z, w);
        const double rel = std::abs(r.value - truth) / truth;
        worst = std::max(worst, rel);
        if (!(rel < 1e-3)) ++bad;
        solved.push_back({&kBall, r.disc, r.converged});
    }
    const double dt = seconds_since(t0);
    report(1, "oracle regression (ball)", bad == 0 && dt < 120.0,
           "max rel err " + fmt("%.2e", worst) + " over 20 pairs, " + fmt("%.1f s", dt));
}

void criterion_2() {
    static const DomainSpec kEll = DomainSpec::ellipsoid({1.0, 4.0});
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    int bad = 0;
    for (int i = 0; i < 10; ++i) {
        const double mu = 0.1 + 0.85 * u(rng);
        ComplexPoint w(2);
        w << std::polar(1.0, 6.283185307179586 * u(rng)), std::polar(1.0, 6.283185307179586 * u(rng));
        w(0) *= u(rng);
        w *= mu / minkowski(kEll, w);
        const double truth = std::atanh(mu);
        const GeodesicResult r = solve_extremal_pair(kEll, ComplexPoint::Zero(2), w);
        const double rel = std::abs(r.value - truth) / truth;
        worst = std::max(worst, rel);
        if (!(rel < 1e-3)) ++bad;
        solved.push_back({&kEll, r.disc, r.converged});
    }
    report(2, "balanced oracle (ellipsoid from the origin)", bad == 0,
           "max rel err " + fmt("%.2e", worst) + " over 10 targets");
}

void criterion_3() {
    const SolverConfig cfg;
    double worst_res = 0.0, pb_lo = 1e300, pb_hi = 0.0;
    int certified = 0;
    for (const auto& s : solved) {
        if (!s.converged) continue;
        worst_res = std::max(worst_res, geodesic_residual(*s.domain, s.disc, cfg));
        ++certified;
    }
    // Pullback identity on a ball disc and an ellipsoid disc.
    for (size_t i : {size_t(0), solved.size() - 1}) {
        const PullbackRatio pr = pullback_metric_ratio(*solved[i].domain, solved[i].disc, cfg);
        pb_lo = std::min(pb_lo, pr.min);
        pb_hi = std::max(pb_hi, pr.max);
    }
    const bool ok = certified > 0 && worst_res < 5e-2 && pb_lo >= 0.95 && pb_hi <= 1.05;
    report(3, "geodesic certification", ok,
           "max residual " + fmt("%.2e", worst_res) + " over " + std::to_string(certified) + " solves, pullback in [" +
               fmt("%.6f", pb_lo) + ", " + fmt("%.6f", pb_hi) + "]");
}

void criterion_4() {
    const DomainSpec ball = DomainSpec::ball(2);
    std::mt19937_64 rng(4);
    std::vector<ComplexPoint> grid;
    while (grid.size() < 1000) {
        const ComplexPoint z = random_in_ball(rng, 2, 1.5);
        if (z(0).real() > -0.5) grid.push_back(z);
    }
    double ball_err = 0.0;
    for (double t : {0.5, 0.9, 0.99})
        for (const auto& z : grid)
            ball_err = std::max(ball_err, std::abs(scaled_defining_rt(ball, t, z) - (z.squaredNorm() - 1.0)));

    const DomainSpec pb = DomainSpec::perturbed_ball(2, 0.05, reference_perturbation(2));
    ComplexPoint z(2);
    z << 0.93, cplx(0.02, -0.01);
    const NormalizationMap map = normalize_boundary(pb, z).map;
    std::vector<ComplexPoint> compact;
    for (const auto& q : grid)
        if (q.norm() <= 1.2 && q(0).real() > -0.4) compact.push_back(q);
    std::vector<double> sup;
    for (double t : {0.9, 0.99, 0.999}) {
        double e = 0.0;
        for (const auto& q : compact) e = std::max(e, std::abs(scaled_defining_rt(map, t, q) - (q.squaredNorm() - 1.0)));
        sup.push_back(e);
    }
    const bool ok = ball_err < 1e-12 && sup[1] <= sup[0] && sup[2] <= sup[1];
    report(4, "exact scaling identity", ok,
           "ball max err " + fmt("%.2e", ball_err) + "; perturbed sup " + fmt("%.3e", sup[0]) + " > " +
               fmt("%.3e", sup[1]) + " > " + fmt("%.3e", sup[2]));
}

void criterion_5() {
    std::mt19937_64 rng(5);
    double worst = 0.0;
    for (double t : {0.5, 0.9})
        for (int i = 0; i < 1000; ++i) {
            const ComplexPoint z = random_in_ball(rng, 2, 1.0), w = random_in_ball(rng, 2, 1.0);
            worst = std::max(worst, std::abs(ball_distance(cayley_At(t, z), cayley_At(t, w)) - ball_distance(z, w)));
        }
    report(5, "Moebius invariance", worst < 1e-10, "max |difference| " + fmt("%.2e", worst) + " over 2000 pairs");
}

struct EpsCampaigns {
    double eps;
    CampaignReport fit, fresh;
};

std::vector<EpsCampaigns> campaigns;

CampaignReport ellipsoid_campaign(double eps, std::uint64_t seed) {
    CampaignConfig cfg;
    cfg.domain = DomainSpec::ellipsoid({1.0, 4.0});
    cfg.decades = {1e-2, 1e-3, 1e-4};
    cfg.eps = eps;
    cfg.pairs = 30;
    cfg.seed = seed;
    return run_campaign(cfg);
}

void run_campaigns() {
    const auto t0 = Clock::now();
    for (double eps : {0.25, 0.5, 1.0})
        campaigns.push_back({eps, ellipsoid_campaign(eps, 1000 + static_cast<std::uint64_t>(eps * 100)),
                             ellipsoid_campaign(eps, 5000 + static_cast<std::uint64_t>(eps * 100))});
    std::printf("       campaigns: 6 x 90 pairs in %.1f s\n", seconds_since(t0));
}

void criterion_6() {
    int converged = 0, violations = 0, failed = 0;
    for (const auto& c : campaigns)
        for (const CampaignReport* r : {&c.fit, &c.fresh}) {
            failed += r->failures;
            for (const auto& s : r->samples) {
                if (!s.ok || !s.converged) continue;
                ++converged;
                if (!(s.lower <= s.k + 1e-9) || !(s.k <= s.upper + 1e-12)) ++violations;
            }
        }
    report(6, "sandwich soundness", converged > 0 && violations == 0,
           std::to_string(violations) + " violations over " + std::to_string(converged) + " converged samples (" +
               std::to_string(failed) + " failed)");
}

const EpsCampaigns& at_eps(double eps) {
    for (const auto& c : campaigns)
        if (c.eps == eps) return c;
    throw std::logic_error("missing campaign");
}

void criterion_7() {
    const auto& c = at_eps(0.5);
    std::vector<double> sup;
    for (const auto& d : c.fit.per_decade) sup.push_back(d.thgen_C.value);
    const double big_c = c.fit.fitted.thgen_C.value, fresh = c.fresh.fitted.thgen_C.value;
    const bool finite = std::all_of(sup.begin(), sup.end(), [](double v) { return std::isfinite(v) && v > 0.0; });
    const bool ok = finite && spread(sup) < 2.0 && fresh <= 2.0 * big_c;
    report(7, "generic ratio bound", ok,
           "sup per decade " + fmt("%.4f", sup[0]) + ", " + fmt("%.4f", sup[1]) + ", " + fmt("%.4f", sup[2]) +
               " (spread " + fmt("%.3f", spread(sup)) + "); fresh " + fmt("%.4f", fresh) + " <= 2 x " +
               fmt("%.4f", big_c));
}

void criterion_8() {
    const auto& c = at_eps(0.5);
    std::vector<double> depth;
    for (const auto& d : c.fit.per_decade) depth.push_back(d.depth.value);
    const bool ok = std::all_of(depth.begin(), depth.end(), [](double v) { return v > 0.0; }) && spread(depth) < 2.0;
    report(8, "geodesic depth", ok,
           "min depth per decade " + fmt("%.4e", depth[0]) + ", " + fmt("%.4e", depth[1]) + ", " +
               fmt("%.4e", depth[2]) + " (spread " + fmt("%.3f", spread(depth)) + ")");
}

/// Counts rows of `id` that fail with the given constant on the samples of `rep`.
int count_failing(const CampaignReport& rep, double eps, const std::function<void(Constants&)>& set, BoundId id) {
    Constants c = rep.fitted;
    set(c);
    int n = 0;
    for (const auto& r : bound_reports(rep.samples, c, eps))
        if (r.id == id && !r.holds()) ++n;
    return n;
}

void criterion_9() {
    bool ok = true;
    std::ostringstream detail;
    for (const auto& c : campaigns) {
        const Constants& f = c.fit.fitted;
        const double eps = c.eps;
        int na = 0;
        for (const CampaignReport* r : {&c.fit, &c.fresh})
            na += count_failing(*r, eps, [](Constants&) {}, BoundId::NA);
        const int bb = count_failing(c.fresh, eps, [&](Constants& k) { k.bb_C.value = f.bb_C.value + 0.5; },
                                     BoundId::BB_LOWER) +
                       count_failing(c.fresh, eps, [&](Constants& k) { k.bb_C.value = f.bb_C.value + 0.5; },
                                     BoundId::BB_UPPER);
        struct Lower {
            const char* name;
            BoundId id;
            Fitted Constants::*field;
        };
        bool lowers = true;
        std::ostringstream ld;
        for (const Lower& l : {Lower{"C2", BoundId::C2, &Constants::c2_c}, Lower{"C3", BoundId::C3, &Constants::c3_c},
                               Lower{"COMBINED", BoundId::COMBINED, &Constants::combined_c}}) {
            const double base = (f.*l.field).value;
            const int half = count_failing(c.fresh, eps, [&](Constants& k) { (k.*l.field).value = 0.5 * base; }, l.id);
            const int dbl = count_failing(c.fresh, eps, [&](Constants& k) { (k.*l.field).value = 2.0 * base; }, l.id);
            lowers = lowers && (f.*l.field).witness >= 0 && half == 0 && dbl > 0;
            ld << ' ' << l.name << " c=" << fmt("%.3f", base) << " (half fails " << half << ", double fails " << dbl
               << ")";
        }
        const bool here = na == 0 && bb == 0 && lowers;
        ok = ok && here;
        detail << "eps=" << eps << ": NA fails " << na << ", BB(C+0.5) fails " << bb << ";" << ld.str() << ". ";
    }
    report(9, "estimate suite", ok, detail.str());
}

void criterion_10() {
    bool ok = true;
    std::ostringstream detail;
    for (const auto& c : campaigns) {
        const Constants& f = c.fit.fitted;
        int fails = 0;
        for (const auto& r : c.fit.reports)
            if ((r.id == BoundId::D1 || r.id == BoundId::D2) && r.converged && !r.holds()) ++fails;
        std::vector<double> d1, d2c, d2C;
        for (const auto& d : c.fit.per_decade) {
            d1.push_back(d.d1_c.value);
            d2c.push_back(d.d2_c.value);
            d2C.push_back(d.d2_C.value);
        }
        const bool here = fails == 0 && f.d1_c.value > 0.0 && f.d2_c.value > 0.0 && std::isfinite(f.d2_C.value) &&
                          spread(d1) < 2.0 && spread(d2c) < 2.0 && spread(d2C) < 2.0;
        ok = ok && here;
        detail << "eps=" << c.eps << ": d1_c=" << fmt("%.3f", f.d1_c.value) << " d2_c=" << fmt("%.3f", f.d2_c.value)
               << " d2_C=" << fmt("%.3f", f.d2_C.value) << " spreads " << fmt("%.2f", spread(d1)) << '/'
               << fmt("%.2f", spread(d2c)) << '/' << fmt("%.2f", spread(d2C)) << ". ";
    }
    report(10, "diameter bounds", ok, detail.str());
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void criterion_11() {
    const fs::path root = fs::temp_directory_path() / "lempert_acceptance";
    fs::remove_all(root);
    std::vector<std::string> csv;
    bool ran = true;
    for (const char* run : {"run1", "run2"}) {
        const fs::path dir = root / run;
        fs::create_directories(dir);
        const std::string cmd = std::string(LEMPERT_BIN) + " verify " + DATA_DIR +
                                "/ellipsoid.json --seed 42 --pairs 5 --decades 1e-2,1e-3 --out " + dir.string() +
                                " > /dev/null 2>&1";
        const int status = std::system(cmd.c_str());
        ran = ran && WIFEXITED(status) && WEXITSTATUS(status) == 0;
        csv.push_back(slurp(dir / "campaign.csv"));
    }
    fs::remove_all(root);
    const bool ok = ran && !csv[0].empty() && csv[0] == csv[1];
    report(11, "determinism", ok, std::to_string(csv[0].size()) + " CSV bytes, identical: " + (csv[0] == csv[1] ? "yes" : "no"));
}

}  // namespace

int main() {
    const auto t0 = Clock::now();
    const std::vector<std::function<void()>> steps{criterion_1, criterion_2, criterion_3, criterion_4,
                                                   criterion_5, run_campaigns, criterion_6, criterion_7,
                                                   criterion_8, criterion_9, criterion_10, criterion_11};
    for (const auto& step : steps) {
        try {
            step();
        } catch (const std::exception& e) {
            std::printf("[FAIL] error: %s\n", e.what());
            ++failures;
        }
    }
    std::printf("acceptance: %d failure(s), %.1f s\n", failures, seconds_since(t0));
    return failures == 0 ? 0 : 1;
}
