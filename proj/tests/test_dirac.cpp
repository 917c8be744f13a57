#include "reslab/dirac.hpp"
#include "reslab/errors.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace reslab;

TEST_SUITE("dirac") {

TEST_CASE("distortion sector") {
    DistortionMap ok{{0.0, 0.3}, 0.5};
    CHECK_NOTHROW(ok.validate());
    DistortionMap big{{0.0, 0.6}, 0.5};
    CHECK_THROWS_AS(big.validate(), DomainError);
    DistortionMap lower{{0.0, -0.1}, 0.5};
    CHECK_THROWS_AS(lower.validate(), DomainError);
    CHECK(DistortionMap::max_modulus(0.5) == doctest::Approx(0.5 / std::sqrt(1.25)));
}

TEST_CASE("essential curve geometry") {
    const cplx th(0.0, 0.5);
    for (const auto& p : essential_curve(th, linspace(0.0, 3.0, 7))) {
        CHECK(std::abs(p.plus * p.plus - (p.lambda / ((1.0 + th) * (1.0 + th)) + 1.0)) < 1e-12);
        CHECK(p.plus.imag() <= 0.0);
        CHECK(distance_to_curve(p.plus, th) < 1e-7);
    }
    CHECK(uncovered_by({1.5, -0.05}, th));
    CHECK_FALSE(uncovered_by({1.5, -1.5}, th));
    CHECK_FALSE(uncovered_by({1.5, 0.05}, th));
    CHECK_FALSE(uncovered_by({0.5, -0.01}, th));
}

TEST_CASE("window clearance sign") {
    const cplx th(0.0, 0.5);
    CHECK(window_clearance({1.35, 1.6, -0.2, 0.0}, th) > 0.0);
    CHECK(window_clearance({1.05, 1.6, -0.9, 0.0}, th) < 0.0);
}

TEST_CASE("channel matrix structure") {
    auto v = ScalarPotential::gaussian(0.5);
    const double h = max_step(0.2);
    auto m = assemble_channel(v, -1, 0.2, {0.0, 0.4}, h, 6.0);
    CHECK(m.symmetry_residual() < 1e-15);
    CHECK(m.hermitian_residual() > 1e-3);
    auto m0 = assemble_channel(v, 2, 0.2, 0.0, h, 6.0);
    CHECK(m0.hermitian_residual() < 1e-15);
    CHECK(m0.dim() == 2 * m0.points);
    CHECK_THROWS_AS(assemble_channel(v, 1, 0.2, 0.0, 2.0 * h, 6.0), RefinementRequired);
}

TEST_CASE("banded real solver agrees with the dense solver at theta = 0") {
    auto v = ScalarPotential::gaussian(0.5);
    auto m = assemble_channel(v, 1, 0.25, 0.0, max_step(0.25), 5.0);
    auto real = channel_eigenvalues_real(m, 1.2, 1.7);
    auto dense = channel_eigenvalues(m);
    std::vector<double> in;
    for (auto z : dense) {
        CHECK(std::abs(z.imag()) < 1e-8);
        if (z.real() >= 1.2 && z.real() <= 1.7) in.push_back(z.real());
    }
    std::sort(in.begin(), in.end());
    REQUIRE(in.size() == real.size());
    for (std::size_t i = 0; i < in.size(); ++i) CHECK(in[i] == doctest::Approx(real[i]).epsilon(1e-10));
}

TEST_CASE("inverse iteration refines a dense eigenvalue") {
    auto v = ScalarPotential::gaussian(0.5);
    auto m = assemble_channel(v, -1, 0.25, {0.0, 0.5}, max_step(0.25), 5.0);
    auto ev = channel_eigenvalues(m);
    const cplx z = ev[ev.size() / 3];
    CHECK(std::abs(refine_eigenvalue(m, z + cplx(1e-4, -1e-4)) - z) < 1e-8 * std::abs(z));
}

TEST_CASE("free Dirac operator has no resonances") {
    auto set = resonances(ScalarPotential::zero(), 0.2, {0.0, 0.5}, {0.0, 0.55}, {1.35, 1.6, -0.2, 0.0}, 2);
    CHECK(set.window_admissible);
    CHECK(set.count() == 0);
    CHECK(set.entries.empty());
}

TEST_CASE("window crossing the essential curve is flagged") {
    auto set = resonances(ScalarPotential::zero(), 0.2, {0.0, 0.1}, {0.0, 0.15}, {1.35, 1.6, -0.2, 0.0}, 1);
    CHECK_FALSE(set.window_admissible);
    CHECK(set.window_clearance < 0.0);
}

TEST_CASE("resonance preconditions") {
    auto v = ScalarPotential::gaussian(0.5);
    CHECK_THROWS_AS(resonances(v, 0.2, {0.0, 0.5}, {0.0, 0.5}, {1.35, 1.6, -0.2, 0.0}, 1), ConfigError);
    CHECK_THROWS_AS(resonances(v, 0.2, {0.0, 0.5}, {0.0, 0.55}, {1.35, 1.6, -0.2, 0.0}, 0), ConfigError);
    CHECK_THROWS_AS(resonances(v, 0.2, {0.0, 0.5}, {0.0, 0.55}, {0.5, 1.6, -0.2, 0.0}, 1), ConfigError);
}

TEST_CASE("kappa rule") {
    CHECK(kappa_max_rule(3.0, 0.1) == 30);
    CHECK(kappa_max_rule(3.0, 0.07) == 43);
}

}
