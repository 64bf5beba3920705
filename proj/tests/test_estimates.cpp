#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "kobayashi/ball_oracle.hpp"
#include "kobayashi/errors.hpp"
#include "kobayashi/estimates.hpp"
#include "support.hpp"

using namespace kobayashi;
using doctest::Approx;
using testing_support::pt;

namespace {

const DomainSpec kBall = DomainSpec::ball(2);

PairMeta synthetic(double dz, double dw, double dist, double xn, double xN) {
    PairMeta m;
    m.delta_z = dz;
    m.delta_w = dw;
    m.dist = dist;
    m.xn = xn;
    m.xN = xN;
    m.eps = xN / dist;
    return m;
}

}  // namespace

TEST_CASE("pair metadata") {
    const auto m = pair_meta(kBall, pt({0.9, 0.0}), pt({0.99, 0.0}));
    CHECK(m.delta_z == Approx(0.1).epsilon(1e-12));
    CHECK(m.delta_w == Approx(0.01).epsilon(1e-10));
    CHECK(m.dist == Approx(0.09).epsilon(1e-12));
    CHECK(m.xn == Approx(0.09).epsilon(1e-12));
    CHECK(m.xN == Approx(0.09).epsilon(1e-12));
    const auto t = pair_meta(kBall, pt({0.9, 0.0}), pt({0.9, 0.1}));
    CHECK(t.xn < 1e-15);
    CHECK(t.xN < 1e-15);
    CHECK(t.xN_w > 0.0);
    CHECK_THROWS_AS(pair_meta(kBall, pt({1.1, 0.0}), pt({0.0, 0.0})), DomainError);
}

TEST_CASE("upper bound NA") {
    const auto z = pt({0.9, 0.0}), w = pt({0.99, 0.0});
    const auto r = bound_upper_na(pair_meta(kBall, z, w), z, w, ball_distance(z, w));
    CHECK(r.rhs == Approx(1.9009276946).epsilon(1e-9));
    CHECK(r.holds());
    CHECK(r.margin == Approx(r.rhs - r.lhs));
    const auto zero = bound_upper_na(pair_meta(kBall, z, z), z, z, 0.0);
    CHECK(zero.rhs == 0.0);
    CHECK(zero.lhs == 0.0);
}

TEST_CASE("lower bounds NT, C2, C3, COMBINED and the band") {
    const auto z = pt({0.9, 0.0}), w = pt({0.95, 0.0});
    const auto m = pair_meta(kBall, z, w);
    const double k = ball_distance(z, w);
    const double c = 0.1;
    const double direct = std::log((1.0 + c * 0.05 / std::sqrt(0.1)) * (1.0 + c * 0.05 / std::sqrt(0.05)));
    CHECK(bound_lower_nt(m, z, w, k, c).rhs == Approx(direct).epsilon(1e-12));
    CHECK(bound_lower_nt(m, z, w, k, 0.0).rhs == 0.0);
    CHECK(bound_lower_nt(pair_meta(kBall, z, z), z, z, 0.0, c).rhs == 0.0);

    const auto band = bound_band_bb(m, z, w, k, 1.0);
    CHECK(band.first.holds());
    CHECK(band.second.holds());
    const auto flat = bound_band_bb(pair_meta(kBall, z, z), z, z, 0.0, 0.0);
    CHECK(flat.first.rhs == 0.0);
    CHECK(flat.second.rhs == 0.0);

    const auto s = synthetic(0.01, 0.01, 0.2, 0.1, 0.1);
    CHECK(bound_lower_c2(s, z, w, 3.0, 1.0).rhs == Approx(std::log(11.0)).epsilon(1e-12));
    const auto tang = synthetic(0.01, 0.01, 0.1, 0.0, 0.0);
    CHECK(bound_lower_c2(tang, z, w, 0.5, 5.0).rhs == 0.0);
    CHECK_FALSE(bound_lower_c3(tang, z, w, 0.5, 1.0, 0.25).applicable);
    const auto normal = synthetic(0.01, 0.02, 0.1, 0.08, 0.1);
    const auto c3 = bound_lower_c3(normal, z, w, 1.0, 0.7, 1.0);
    CHECK(c3.applicable);
    CHECK(c3.rhs == Approx(std::log1p(0.7 * 0.1 / std::sqrt(0.01 * 0.02))).epsilon(1e-12));

    const double x = (0.08 + 0.01) / std::sqrt(0.0002) + 0.1 / 0.1 + 0.1 / std::sqrt(0.02);
    CHECK(combined_lower(normal, z, w, 1.0, 0.3).rhs == Approx(std::log1p(0.3 * x)).epsilon(1e-12));
}

TEST_CASE("max / average inequality") {
    CHECK(max_average_gap(0.0, 0.0) == 0.0);
    CHECK(max_average_gap(3.0, 1.0) == Approx(std::log(4.0) - std::log(3.0)));
    std::mt19937_64 rng(9);
    std::exponential_distribution<double> e(0.1);
    double worst = 0.0;
    for (int i = 0; i < 100000; ++i) worst = std::min(worst, max_average_gap(e(rng), e(rng)));
    CHECK(worst >= -1e-12);
    CHECK_THROWS_AS(max_average_gap(-1.0, 0.0), DomainError);
}

TEST_CASE("geodesic quantities") {
    CHECK(s_function(0.01) == Approx(0.4605170186).epsilon(1e-10));
    CHECK_THROWS_AS(s_function(0.0), DomainError);

    // Linear slice through the centre.
    const auto g0 = geodesic_profile(kBall, ball_geodesic(pt({0.0, 0.0}), pt({0.5, 0.0})).disc);
    CHECK(g0.diam == Approx(2.0).epsilon(1e-12));
    CHECK(g0.max_sqrt_delta == Approx(1.0).epsilon(1e-12));
    CHECK(g0.max_derivative == Approx(1.0).epsilon(1e-12));
    const auto cp = conjecture_probe(g0);
    CHECK(cp.diam_over_depth == Approx(2.0).epsilon(1e-12));
    CHECK(cp.diam_over_derivative == Approx(2.0).epsilon(1e-12));
    CHECK(cp.depth_over_derivative == Approx(1.0).epsilon(1e-12));

    // Radial pair near the boundary: |(z-w)_N| = |z-w| and diam = 2.
    const double delta = 1e-3;
    const auto z = pt({1.0 - delta, 0.0}), w = pt({1.0 - 2.0 * delta, 0.0});
    PairMeta m = pair_meta(kBall, z, w);
    const auto g = geodesic_profile(kBall, *oracle_geodesic(kBall, z, w));
    m.diam = g.diam;
    CHECK(m.xN / (m.dist * m.diam) == Approx(0.5).epsilon(1e-9));
    CHECK(thmgen_ratio(m, z, w, 0.5).margin == Approx(0.0).scale(1e-9));
    CHECK(g.max_sqrt_delta == Approx(1.0).epsilon(1e-12));
    const auto tang = pt({1.0 - delta, 0.01});
    CHECK(thmgen_ratio(pair_meta(kBall, z, tang), z, tang, 1.0).lhs < 1e-15);

    const auto db = diam_bounds(m, g, z, w, 0.5, 10.0);
    CHECK(db.first.holds());
    CHECK(db.second.holds());
}

TEST_CASE("oracles for balls and ellipsoids") {
    const DomainSpec e = DomainSpec::ellipsoid({1.0, 4.0});
    const auto z = pt({0.3, {0.0, 0.1}}), w = pt({-0.2, 0.2});
    const double k = *oracle_distance(e, z, w);
    CHECK(k == Approx(ball_distance(pt({0.3, {0.0, 0.2}}), pt({-0.2, 0.4}))).epsilon(1e-14));
    const auto d = *oracle_geodesic(e, z, w);
    CHECK((d(0.0) - z).norm() < 1e-12);
    double a = 0.0;
    for (const auto& q : d.boundary_samples(64)) a = std::max(a, std::abs(e.r(q)));
    CHECK(a < 1e-12);
    CHECK_FALSE(oracle_distance(testing_support::perturbed(), z, w).has_value());
}

TEST_CASE("campaign plumbing") {
    CampaignConfig cfg;
    cfg.domain = kBall;
    cfg.decades = {1e-2};
    cfg.pairs = 0;
    const auto empty = run_campaign(cfg);
    CHECK(empty.samples.empty());
    CHECK(empty.passed());
    CHECK(empty.csv() == csv_header(2));

    cfg.pairs = 3;
    cfg.eps = 0.5;
    const auto a = run_campaign(cfg);
    const auto b = run_campaign(cfg);
    CHECK(a.failures == 0);
    CHECK(a.passed());
    CHECK(a.csv() == b.csv());
    for (const auto& s : a.samples) {
        CHECK(s.meta.eps == Approx(0.5).epsilon(1e-6));
        CHECK(s.meta.delta_z == Approx(1e-2).epsilon(0.05));
        CHECK(s.lower <= s.k + 1e-9);
        CHECK(s.k <= s.upper + 1e-12);
    }
    cfg.threads = 3;
    CHECK(run_campaign(cfg).csv() == a.csv());

    // The closed-form path gives the same distance-based constants.
    cfg.use_oracle = true;
    const auto o = run_campaign(cfg);
    CHECK(o.fitted.c2_c.value == Approx(a.fitted.c2_c.value).epsilon(1e-3));
    CHECK(o.fitted.combined_c.value == Approx(a.fitted.combined_c.value).epsilon(1e-3));
    CHECK(o.fitted.nt_c.value == Approx(a.fitted.nt_c.value).epsilon(1e-3));

    const auto j = a.summary();
    CHECK(j["samples"] == 3);
    CHECK(j["fitted"]["c2_c"]["witness"].get<int>() >= 0);

    cfg.decades = {1e-3, 1e-2};
    CHECK_THROWS_AS(run_campaign(cfg), PreconditionError);
}

TEST_CASE("atomic write") {
    const auto dir = std::filesystem::temp_directory_path() / "kobayashi_atomic_test";
    std::filesystem::create_directories(dir);
    const auto path = (dir / "out.csv").string();
    write_atomic(path, "a,b\n1,2\n");
    write_atomic(path, "a,b\n3,4\n");
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    CHECK(ss.str() == "a,b\n3,4\n");
    CHECK_FALSE(std::filesystem::exists(path + ".tmp"));
    std::filesystem::remove_all(dir);
    CHECK_THROWS_AS(write_atomic("/nonexistent_dir_xyz/out.csv", "x"), Error);
}
