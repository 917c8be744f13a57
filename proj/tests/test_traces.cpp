#include "reslab/errors.hpp"
#include "reslab/traces.hpp"

#include <doctest.h>

#include <cmath>

using namespace reslab;

TEST_SUITE("traces") {

TEST_CASE("Gaussian probe") {
    GaussianProbe p{1.5, 1.0, 100.0};
    CHECK(std::abs(p(1.5)) == doctest::Approx(1.0));
    CHECK(std::abs(p(1.6)) == doctest::Approx(std::exp(-0.5)));
}

TEST_CASE("test function spec") {
    auto tf = TestFunctionSpec::polynomial({1.2, 1.7, 0.1}, {1.0, 2.0});
    CHECK(tf.chi_f(1.5) == cplx(4.0, 0.0));
    CHECK(tf.chi_f(1.0) == cplx(0.0, 0.0));
    const double h = 1e-6;
    for (double E : {1.15, 1.45, 1.75}) {
        const cplx fd = (tf.chi_f(E + h) - tf.chi_f(E - h)) / (2 * h);
        CHECK(std::abs(tf.chi_f_derivative(E) - fd) < 1e-5);
    }
    CHECK(tf.scaled(2.0).chi_f(1.5) == cplx(8.0, 0.0));
    CHECK_THROWS_AS(TestFunctionSpec::polynomial({1.2, 1.7, 0.1}, {}).validate(), ConfigError);
}

TEST_CASE("trace difference of identical operators vanishes") {
    auto v = ScalarPotential::gaussian(0.5);
    auto tf = TestFunctionSpec::polynomial({1.2, 1.7, 0.1}, {1.0});
    TraceOptions o;
    o.r_max = 8.0;
    auto t = trace_difference(v, v, 0.25, tf, 3, o);
    CHECK(std::abs(t.value) == 0.0);
}

TEST_CASE("trace difference is linear in f") {
    auto v2 = ScalarPotential::gaussian(0.5), v1 = ScalarPotential::zero();
    TraceOptions o;
    o.r_max = 8.0;
    auto a = trace_difference(v1, v2, 0.25, TestFunctionSpec::polynomial({1.2, 1.7, 0.1}, {1.0}), 3, o);
    auto b = trace_difference(v1, v2, 0.25, TestFunctionSpec::polynomial({1.2, 1.7, 0.1}, {-2.5}), 3, o);
    CHECK(std::abs(b.value + 2.5 * a.value) < 1e-9 * std::abs(a.value));
}

TEST_CASE("phase-space trace: two routes agree") {
    auto v2 = ScalarPotential::gaussian(0.5), v1 = ScalarPotential::zero();
    auto ps = phase_space_trace(v1, v2, 1.0, TestFunctionSpec::polynomial({1.2, 1.7, 0.1}, {1.0}));
    CHECK(ps.value.real() == doctest::Approx(-0.51335149).epsilon(1e-6));
    CHECK(ps.consistency < 1e-5);
    auto ps2 = phase_space_trace(v1, v2, 0.5, TestFunctionSpec::polynomial({1.2, 1.7, 0.1}, {1.0}));
    CHECK(ps2.value.real() == doctest::Approx(8.0 * ps.value.real()).epsilon(1e-12));
}

TEST_CASE("phase-space trace rejects the forbidden band") {
    auto v2 = ScalarPotential::gaussian(0.5), v1 = ScalarPotential::zero();
    CHECK_THROWS_AS(phase_space_trace(v1, v2, 1.0, TestFunctionSpec::polynomial({0.5, 1.2, 0.1}, {1.0})), DomainError);
}

TEST_CASE("complex windows") {
    ComplexWindow w;
    CHECK(w.in_inner({1.5, -0.01}));
    CHECK_FALSE(w.in_inner({1.75, -0.01}));
    CHECK(w.in_omega({1.75, -0.01}));
    auto has = [](const std::vector<std::string>& ws, const std::string& key) {
        for (const auto& s : ws)
            if (s.find(key) != std::string::npos) return true;
        return false;
    };
    CHECK_FALSE(has(w.warnings(), "a/b"));
    ComplexWindow d{0.5, 0.2, 0.2};
    CHECK(has(d.warnings(), "a/b"));
    ComplexWindow narrow{0.5, 0.01, 0.2};
    CHECK(narrow.warnings().empty());
}

TEST_CASE("Gaussian probe is suppressed off the inner window") {
    auto rep = suppression_check({}, GaussianProbe{1.5, 1.0, 100.0}, 200);
    CHECK(rep.pass);
    CHECK(rep.c0_lower > 0.0);
}

}
