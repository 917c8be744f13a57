#include "reslab/errors.hpp"
#include "reslab/potentials.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace reslab;

TEST_SUITE("potentials") {

TEST_CASE("evaluation examples") {
    auto g = ScalarPotential::gaussian(0.5);
    CHECK(g({0, 0, 0}) == 0.5);
    CHECK(g.radial(10.0) == doctest::Approx(0.5 * std::exp(-100.0)).epsilon(1e-12));
    CHECK(g.radial(10.0) == doctest::Approx(1.86e-44).epsilon(1e-2));
    auto l = ScalarPotential::lorentz(1.0, 4.0);
    CHECK(l({1, 0, 0}) == doctest::Approx(0.25));
    CHECK(eval_potential(l, {0, 1, 0}) == doctest::Approx(0.25));
}

TEST_CASE("thresholds formula") {
    auto t = thresholds(0.5, -0.3);
    CHECK(t.l_plus == 1.0);
    CHECK(t.l_minus == -1.0);
    t = thresholds(2.5, 0.0);
    CHECK(t.l_plus == 1.5);
    CHECK(t.l_minus == -1.0);
    t = thresholds(0.0, -2.5);
    CHECK(t.l_plus == 1.0);
    CHECK(t.l_minus == -1.5);
}

TEST_CASE("thresholds are monotone in sup v") {
    double prev = 0.0;
    for (double s = -1.0; s < 5.0; s += 0.25) {
        CHECK(thresholds(s, -1.0).l_plus >= prev);
        prev = thresholds(s, -1.0).l_plus;
    }
}

TEST_CASE("cached extrema bound the samples") {
    auto v = ScalarPotential::anisotropic_gaussian(0.7, {1.0, 0.5, 2.0});
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int i = 0; i < 200; ++i) {
        const double x = v({u(rng), u(rng), u(rng)});
        CHECK(x <= v.sup_v() + 1e-15);
        CHECK(x >= v.inf_v() - 1e-15);
    }
}

TEST_CASE("radius_below is an upper bound on the tail") {
    for (auto v : {ScalarPotential::gaussian(0.5), ScalarPotential::lorentz(1.0, 4.0)}) {
        for (double level : {1e-3, 1e-8}) {
            const double r = v.radius_below(level);
            for (double s = r; s < r + 20.0; s += 0.5) CHECK(std::abs(v.radial(s)) <= level * (1 + 1e-9));
        }
    }
}

TEST_CASE("decay assumption report") {
    SampleSpec spec = default_sample_spec();
    spec.radii = {5, 10, 20, 40};
    auto z = ScalarPotential::zero();
    auto rep = verify_assumption(z, ScalarPotential::gaussian(0.5), spec);
    CHECK(rep.pass_diff);
    CHECK(rep.exponent_diff > 3.0);

    auto l4 = ScalarPotential::lorentz(1.0, 4.0);
    rep = verify_assumption(l4, l4, spec);
    CHECK(rep.pass_diff);

    auto l2 = ScalarPotential::lorentz(1.0, 2.0);
    rep = verify_assumption(z, l2, spec);
    CHECK(rep.exponent_diff == doctest::Approx(2.0).epsilon(0.05));
    CHECK_FALSE(rep.pass_diff);

    spec.radii = {5, 10};
    CHECK_THROWS_AS(verify_assumption(z, l2, spec), ConfigError);
}

TEST_CASE("mollifier kernel has unit mass") {
    const double C0 = std::pow(2.0 * M_PI, -1.5);
    auto q = integrate([&](double r) { return 4.0 * M_PI * r * r * C0 * std::exp(-0.5 * r * r); }, 0.0, 40.0, 1e-13);
    CHECK(std::abs(q.value - 1.0) <= 1e-8);
    for (double rho : {0.0, 3.0, 50.0})
        for (double lam : {0.05, 0.3, 1.0}) CHECK(std::abs(mollifier_mass(rho, lam) - 1.0) <= 1e-8);
}

TEST_CASE("Peetre inequality at the local width") {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> n(0.0, 5.0);
    const double delta = 4.0, R = 10.0;
    for (int i = 0; i < 500; ++i) {
        Vec3 x{n(rng), n(rng), n(rng)}, w{n(rng), n(rng), n(rng)};
        const double lam = mollifier_width(norm(x), R);
        Vec3 y{x[0] + lam * w[0], x[1] + lam * w[1], x[2] + lam * w[2]};
        const double lhs = std::pow(japanese(norm(y)), -delta);
        const double rhs = std::pow(2.0, delta / 2) * std::pow(japanese(norm(x)), -delta) * std::pow(japanese(norm(w)), delta);
        CHECK(lhs <= rhs * (1 + 1e-12));
    }
}

TEST_CASE("mollification of a compactly supported bump vanishes") {
    auto v1 = mollify_split(ScalarPotential::bump(0.5, 1.0), 2.0);
    for (double r = 0.0; r < 10.0; r += 0.25) CHECK(v1.radial(r) == 0.0);
}

TEST_CASE("mollified Gaussian respects the smallness bound") {
    auto v2 = ScalarPotential::gaussian(0.5);
    const double R = mollification_radius(v2, 1e-3);
    CHECK(0.5 * std::exp(-R * R) <= 1e-3 * (1 + 1e-9));
    auto v1 = mollify_split(v2, R);
    double sup = 0.0;
    for (double r = 0.0; r < 12.0; r += 0.1) sup = std::max(sup, std::abs(v1.radial(r)));
    CHECK(sup <= 1e-3);
    CHECK(sup > 0.0);
}

TEST_CASE("mollification is linear") {
    auto v2 = ScalarPotential::gaussian(0.5);
    auto a = mollify_split(v2, 2.0), b = mollify_split(v2.scaled(3.0), 2.0);
    for (double r : {0.0, 1.5, 3.0, 4.5}) CHECK(b.radial(r) == doctest::Approx(3.0 * a.radial(r)).epsilon(1e-7));
}

TEST_CASE("three-dimensional quadrature agrees with the radial kernel") {
    auto v2 = ScalarPotential::gaussian(0.5);
    auto v1 = mollify_split(v2, 2.0);
    for (double r : {0.5, 2.5}) CHECK(mollify_eval_3d(v2, 2.0, {r, 0.0, 0.0}) == doctest::Approx(v1.radial(r)).epsilon(1e-5));
}

TEST_CASE("tabulated profile reproduces the source") {
    auto v = ScalarPotential::gaussian(0.5);
    auto t = tabulate(v);
    for (double r : {0.0, 0.3, 1.111, 2.5, 4.0}) CHECK(std::abs(t.radial(r) - v.radial(r)) < 1e-9);
    CHECK(t.sup_v() == doctest::Approx(0.5));
}

TEST_CASE("config declarations") {
    auto g = potential_from_json({{"kind", "gaussian"}, {"amplitude", 0.25}});
    CHECK(g.radial(0.0) == 0.25);
    CHECK_THROWS_AS(potential_from_json({{"kind", "nonsense"}}), ConfigError);
    CHECK_THROWS_AS(potential_from_json({{"kind", "table"}, {"file", "/nonexistent/profile.csv"}}), ConfigError);
    CHECK_THROWS_AS(potential_from_json({{"kind", "mollified"}, {"base", {{"kind", "gaussian"}}}}), ConfigError);
}

}
