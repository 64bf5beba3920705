#include <cmath>
#include <random>

#include "doctest.h"
#include "kobayashi/errors.hpp"
#include "kobayashi/geometry.hpp"
#include "support.hpp"

using namespace kobayashi;
using doctest::Approx;
using testing_support::pt;

TEST_CASE("domain JSON round trip and parsing") {
    const auto pb = testing_support::perturbed();
    const auto back = DomainSpec::from_json(pb.to_json());
    CHECK(back.to_json() == pb.to_json());
    const auto z = pt({cplx(0.3, -0.2), cplx(0.1, 0.5)});
    CHECK(back.r(z) == Approx(pb.r(z)).epsilon(1e-15));

    auto j = nlohmann::json::parse(R"({"variant":"perturbed_ball","dim":2,"eta":0.1,"q":{"x1^2*y2":2.0,"1":0.5}})");
    const auto d = DomainSpec::from_json(j);
    // r(1, i) = 1 + 1 - 1 + 0.1 (2 * 1 * 1 + 0.5)
    CHECK(d.r(pt({1.0, cplx(0.0, 1.0)})) == Approx(1.25).epsilon(1e-14));
    CHECK_THROWS_AS(DomainSpec::from_json(nlohmann::json::parse(R"({"variant":"cube","dim":2})")), ParseError);
    CHECK_THROWS_AS(DomainSpec::from_json(nlohmann::json::parse(R"({"variant":"ellipsoid","dim":2,"a":[1]})")),
                    ParseError);
    CHECK_THROWS_AS(RealPolynomial::parse_key("x3^2", 2), ParseError);
    CHECK_THROWS(DomainSpec::from_json(
        nlohmann::json::parse(R"({"variant":"perturbed_ball","dim":2,"eta":0.1,"q":{"x1^3*y2^2":1.0}})")));
    CHECK(RealPolynomial::format_key(RealPolynomial::parse_key("x1^2*y2", 2)) == "x1^2*y2");
}

TEST_CASE("polynomial derivatives match finite differences") {
    const auto q = reference_perturbation(2);
    const Eigen::Vector4d x(0.3, -0.7, 0.2, 0.9);
    const double h = 1e-6;
    const Eigen::VectorXd g = q.gradient(x);
    const Eigen::MatrixXd H = q.hessian(x);
    for (int i = 0; i < 4; ++i) {
        Eigen::VectorXd xp = x, xm = x;
        xp(i) += h;
        xm(i) -= h;
        CHECK(g(i) == Approx((q.value(xp) - q.value(xm)) / (2 * h)).epsilon(1e-7));
        const Eigen::VectorXd col = (q.gradient(xp) - q.gradient(xm)) / (2 * h);
        for (int k = 0; k < 4; ++k) CHECK(std::abs(H(k, i) - col(k)) < 1e-7);
    }
}

TEST_CASE("Levi and holomorphic Hessians from the real Hessian") {
    // r = |z1|^2 + Re(z1^2) has L = diag(1), S = 1 in the (1,1) slot.
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(2, 2);
    h(0, 0) = 4.0;  // x^2 + x^2 - y^2 -> 2x^2 : second derivative 4
    h(1, 1) = 0.0;
    CHECK(std::abs(complex_hessian_from_real(h)(0, 0) - cplx(1.0)) < 1e-15);
    CHECK(std::abs(holomorphic_hessian_from_real(h)(0, 0) - cplx(1.0)) < 1e-15);
    const auto ell = DomainSpec::ellipsoid({1.0, 4.0});
    const auto L = ell.levi_matrix(pt({0.1, 0.2}));
    CHECK(std::abs(L(0, 0) - 1.0) < 1e-15);
    CHECK(std::abs(L(1, 1) - 4.0) < 1e-15);
    CHECK(std::abs(L(0, 1)) < 1e-15);
    CHECK(ell.holomorphic_hessian(pt({0.1, 0.2})).norm() < 1e-15);
}

TEST_CASE("signed distance reference values") {
    const auto ball = DomainSpec::ball(2);
    CHECK(signed_distance(ball, pt({0.0, 0.0})) == Approx(-1.0).epsilon(1e-13));
    CHECK(signed_distance(ball, pt({0.9, 0.0})) == Approx(-0.1).epsilon(1e-13));
    CHECK(signed_distance(ball, pt({1.5, 0.0})) == Approx(0.5).epsilon(1e-13));
    const auto ell = DomainSpec::ellipsoid({1.0, 4.0});
    CHECK(signed_distance(ell, pt({0.0, 0.25})) == Approx(-0.25).epsilon(1e-12));
    CHECK(boundary_distance(ell, pt({0.0, 0.25})) == Approx(0.25).epsilon(1e-12));
    CHECK_THROWS_AS(boundary_distance(ell, pt({0.0, 0.6})), DomainError);
    CHECK_THROWS_AS(signed_distance(ell, pt({2.5, 0.0})), DomainError);
}

TEST_CASE("signed distance agrees with dense boundary sampling") {
    // Brute force over a parametrisation of the ellipsoid boundary.
    const auto ell = DomainSpec::ellipsoid({1.0, 4.0});
    const auto z = pt({cplx(0.3, 0.1), cplx(0.2, -0.15)});
    double best = 1e9;
    const int n = 48;
    for (int i = 0; i <= 4 * n; ++i) {
        const double chi = M_PI / 2 * i / (4 * n);
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                const cplx z1 = std::polar(std::cos(chi), 2 * M_PI * j / n);
                const cplx z2 = std::polar(std::sin(chi) / 2.0, 2 * M_PI * k / n);
                best = std::min(best, std::hypot(std::abs(z1 - z(0)), std::abs(z2 - z(1))));
            }
    }
    const double sd = signed_distance(ell, z);
    CHECK(sd < 0.0);
    CHECK(-sd <= best + 1e-12);
    CHECK(-sd == Approx(best).epsilon(5e-3));
}

TEST_CASE("boundary frame on the ball") {
    const auto ball = DomainSpec::ball(2);
    auto f = boundary_frame(ball, pt({0.9, 0.0}));
    CHECK((f.nearest - pt({1.0, 0.0})).norm() < 1e-12);
    CHECK(f.sdist == Approx(-0.1).epsilon(1e-12));
    CHECK((f.gbar - pt({0.5, 0.0})).norm() < 1e-12);
    f = boundary_frame(ball, pt({0.0, cplx(0.0, 0.5)}));
    CHECK((f.nearest - pt({0.0, cplx(0.0, 1.0)})).norm() < 1e-12);
    CHECK((f.gbar - pt({0.0, cplx(0.0, 0.5)})).norm() < 1e-12);
    std::mt19937_64 rng(3);
    for (int k = 0; k < 50; ++k) {
        const auto z = testing_support::random_in_ball(rng, 2, 0.98);
        const auto fr = boundary_frame(ball, z);
        CHECK((fr.nearest - z / z.norm()).norm() < 1e-12);
        CHECK(2.0 * fr.gbar.norm() == Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("boundary frame residuals on the perturbed ball") {
    const auto pb = testing_support::perturbed();
    for (const auto& z : {pt({0.9, 0.05}), pt({cplx(0.7, 0.3), cplx(0.1, -0.4)}), pt({-0.2, cplx(0.0, 0.93)})}) {
        const auto f = boundary_frame(pb, z);
        CHECK(std::abs(pb.r(f.nearest)) < 1e-12);
        CHECK((z - f.nearest).norm() == Approx(-f.sdist).epsilon(1e-10));
        // z - p is parallel to the real gradient of r at p.
        const Eigen::VectorXd g = pb.grad_real(to_real(f.nearest)).normalized();
        const Eigen::VectorXd v = to_real(f.nearest - z).normalized();
        CHECK(g.dot(v) == Approx(1.0).epsilon(1e-10));
        CHECK(2.0 * f.gbar.norm() == Approx(1.0).epsilon(1e-12));
        CHECK(f.nu.norm() == Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("sign of the signed distance follows r") {
    const auto pb = testing_support::perturbed();
    std::mt19937_64 rng(5);
    for (int k = 0; k < 200; ++k) {
        const auto z = testing_support::random_in_ball(rng, 2, 1.3);
        if (std::abs(pb.r(z)) < 1e-9) continue;
        CHECK((signed_distance(pb, z) < 0.0) == (pb.r(z) < 0.0));
    }
}

TEST_CASE("normal split") {
    const auto ball = DomainSpec::ball(2);
    const auto f = boundary_frame(ball, pt({0.9, 0.0}));
    const cplx a(0.3, -0.7), b(-1.1, 0.4);
    auto s = normal_split(f, pt({a, b}));
    CHECK((s.normal - pt({a, 0.0})).norm() < 1e-12);
    CHECK((s.tangential - pt({0.0, b})).norm() < 1e-12);
    CHECK(s.xn_abs == Approx(std::abs(a.real())).epsilon(1e-12));
    CHECK(s.xN_abs == Approx(std::abs(a)).epsilon(1e-12));
    s = normal_split(f, f.gbar * cplx(0.0, 3.0));
    CHECK(s.tangential.norm() < 1e-12);

    const auto ell = DomainSpec::ellipsoid({1.0, 4.0});
    const auto fe = boundary_frame(ell, pt({0.0, 0.4}));
    const auto X = pt({1.0, 1.0});
    const auto se = normal_split(fe, X);
    // Nearest point (0, 0.5); the normal is the z2 axis.
    CHECK((se.normal - pt({0.0, 1.0})).norm() < 1e-10);
    CHECK((se.tangential - pt({1.0, 0.0})).norm() < 1e-10);
    std::mt19937_64 rng(8);
    const auto pb = testing_support::perturbed();
    for (int k = 0; k < 100; ++k) {
        const auto z = testing_support::random_in_ball(rng, 2, 0.97);
        if (boundary_distance(pb, z) > 0.2) continue;
        const auto fr = boundary_frame(pb, z);
        const auto x = testing_support::random_in_ball(rng, 2, 3.0);
        const auto sp = normal_split(fr, x);
        CHECK(x.squaredNorm() == Approx(sp.normal.squaredNorm() + sp.tangential.squaredNorm()).epsilon(1e-12));
        CHECK(sp.xn_abs <= sp.xN_abs + 1e-15);
        const auto xr = fr.gbar * cplx(2.5, 0.0);
        CHECK(normal_split(fr, xr).xn_abs == Approx(normal_split(fr, xr).xN_abs).epsilon(1e-12));
    }
}

TEST_CASE("h product") {
    const auto ball = DomainSpec::ball(2);
    CHECK(h_product(ball, pt({0.0, 0.0}), pt({0.0, 0.0})) == Approx(1.0).epsilon(1e-12));
    CHECK(h_product(ball, pt({0.9, 0.0}), pt({0.0, 0.0})) == Approx(std::sqrt(0.1)).epsilon(1e-12));
    const auto ell = DomainSpec::ellipsoid({1.0, 4.0});
    const auto z = pt({0.0, 0.4}), w = pt({0.5, 0.1});
    CHECK(h_product(ell, z, w) ==
          Approx(std::sqrt(signed_distance(ell, z) * signed_distance(ell, w))).epsilon(1e-14));
}

TEST_CASE("Levi audit and convexity audit") {
    CHECK(levi_audit(DomainSpec::ball(2), pt({1.0, 0.0}), pt({0.0, 1.0})) == Approx(1.0));
    CHECK(levi_audit(DomainSpec::ellipsoid({1.0, 4.0}), pt({1.0, 0.0}), pt({0.0, 1.0})) == Approx(4.0));
    const auto rb = convexity_audit(DomainSpec::ball(2), 200, 1);
    CHECK(rb.min_real_hessian_eig == Approx(2.0).epsilon(1e-12));
    const auto re = convexity_audit(DomainSpec::ellipsoid({1.0, 4.0}), 200, 1);
    CHECK(re.min_real_hessian_eig == Approx(2.0).epsilon(1e-12));
    const auto rp = convexity_audit(testing_support::perturbed(), 500, 2);
    CHECK(rp.min_real_hessian_eig > 0.0);
    CHECK(rp.min_levi_eig > 0.0);
    // A large perturbation destroys convexity.
    auto bad = DomainSpec::perturbed_ball(2, 20.0, RealPolynomial(2, {Monomial{{2, 0, 0, 2}, 1.0}}));
    CHECK_THROWS_AS(convexity_audit(bad, 200, 3), InvalidDomain);
}

TEST_CASE("ray exit") {
    const auto ball = DomainSpec::ball(2);
    CHECK(ray_exit(ball, pt({0.0, 0.0}), pt({1.0, 0.0})) == Approx(1.0).epsilon(1e-15));
    CHECK(ray_exit(ball, pt({0.5, 0.0}), pt({-1.0, 0.0})) == Approx(1.5).epsilon(1e-15));
    const auto pb = testing_support::perturbed();
    const auto o = pt({0.1, cplx(0.0, 0.2)});
    const auto u = pt({cplx(0.6, 0.0), cplx(0.0, 0.8)});
    const double s = ray_exit(pb, o, u);
    CHECK(std::abs(pb.r(o + s * u)) < 1e-13);
}
