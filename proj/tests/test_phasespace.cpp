#include "reslab/errors.hpp"
#include "reslab/phasespace.hpp"

#include <doctest.h>

#include <cmath>

using namespace reslab;

namespace {
std::vector<double> grid(double lo, double hi, double h) {
    std::vector<double> g;
    for (long k = 0; lo + k * h <= hi + 1e-12; ++k) g.push_back(lo + k * h);
    return g;
}
}  // namespace

TEST_SUITE("phasespace") {

TEST_CASE("level set volume of a Gaussian matches the ball volume") {
    auto g = ScalarPotential::gaussian(1.0);
    // vol{exp(-r^2) >= E} = 4 pi / 3 (-log E)^(3/2)
    CHECK(level_set_volume(g, std::exp(-1.0), Side::geq).value == doctest::Approx(4.18879020478639098).epsilon(1e-8));
    CHECK(level_set_volume(g, std::exp(-4.0), Side::geq).value == doctest::Approx(33.5103216382911279).epsilon(1e-8));
    CHECK(level_set_volume(g, 0.25, Side::geq).value == doctest::Approx(6.83709783363666317).epsilon(1e-8));
    CHECK(level_set_volume(g, 1.5, Side::geq).value == 0.0);
    CHECK_THROWS_AS(level_set_volume(g, -0.1, Side::geq), DomainError);
}

TEST_CASE("level set volume of a non-radial potential by quasi Monte Carlo") {
    auto a = ScalarPotential::anisotropic_gaussian(1.0, {1.0, 1.0, 1.0});
    auto est = level_set_volume(a, std::exp(-1.0), Side::geq);
    CHECK(est.value == doctest::Approx(4.18879020478639098).epsilon(2e-2));
}

TEST_CASE("rho against an independent radial quadrature") {
    auto v2 = ScalarPotential::gaussian(0.5), v1 = ScalarPotential::zero();
    CHECK(rho_at(v1, v2, 1.25) == doctest::Approx(-47.42834666018754).epsilon(1e-8));
    CHECK(rho_at(v1, v2, 1.5) == doctest::Approx(-98.73731849323896).epsilon(1e-8));
    CHECK(rho_at(v1, v2, -1.25) == doctest::Approx(-83.66402381574280).epsilon(1e-8));
    CHECK(rho_via_level_sets(v1, v2, 1.25) == doctest::Approx(rho_at(v1, v2, 1.25)).epsilon(1e-6));
}

TEST_CASE("forbidden band is rejected") {
    auto v2 = ScalarPotential::gaussian(0.5), v1 = ScalarPotential::zero();
    CHECK(branch_sign(v1, v2, 1.2) == 1);
    CHECK(branch_sign(v1, v2, -1.2) == -1);
    CHECK_THROWS_AS(branch_sign(v1, v2, 0.5), DomainError);
}

TEST_CASE("identical potentials give vanishing distributions") {
    auto v = ScalarPotential::gaussian(0.5);
    auto nm = build_nu_mu(v, v, grid(0.01, 0.6, 0.01));
    CHECK(nm.mu.max_abs() == 0.0);
    CHECK(nm.nu.max_abs() == 0.0);
    auto om = omega(v, v, grid(1.05, 1.2, 0.01));
    CHECK(om.direct.max_abs() == 0.0);
}

TEST_CASE("mu is supported in the range of v2") {
    auto v2 = ScalarPotential::gaussian(0.5), v1 = ScalarPotential::zero();
    auto g = grid(0.01, 0.8, 0.01);
    auto nm = build_nu_mu(v1, v2, g);
    for (std::size_t i = 0; i < g.size(); ++i)
        if (g[i] > 0.5 + 0.011) CHECK(nm.mu.values[i] == 0.0);
    CHECK(nm.nu.values.front() < 0.0);
}

TEST_CASE("grid preconditions") {
    auto v = ScalarPotential::gaussian(0.5), z = ScalarPotential::zero();
    CHECK_THROWS_AS(build_nu_mu(z, v, {-0.1, 0.0, 0.1}), ConfigError);
    CHECK_THROWS_AS(build_nu_mu(z, v, {0.1, 0.2}), ConfigError);
}

TEST_CASE("kernel identities") {
    using namespace kernel;
    for (double x : {-3.0, -1.5, -0.5, 0.0, 0.7, 1.2, 4.0}) {
        CHECK(phi(x) == doctest::Approx(phi_plus(x) + phi_minus(x)));
        CHECK(phi_tilde_plus(x) == doctest::Approx(phi_plus(x + 1.0)));
        CHECK(phi_tilde_minus(x) == doctest::Approx(phi_minus(x - 1.0)));
        CHECK(Phi(x) == doctest::Approx(Phi_plus(x) + Phi_minus(x)));
    }
    // Phi' = phi
    for (double x : {1.3, 2.0, -2.5}) {
        const double d = (Phi(x + 1e-6) - Phi(x - 1e-6)) / 2e-6;
        CHECK(d == doctest::Approx(phi(x)).epsilon(1e-6));
    }
}

TEST_CASE("shift operator translates the grid") {
    EnergyDistribution d;
    d.grid = {0.1, 0.2, 0.3};
    d.values = {1, 2, 3};
    auto s = d.shifted(1.0);
    CHECK(s.grid[0] == doctest::Approx(1.1));
    CHECK(s.values == d.values);
}

TEST_CASE("convolution identity on a coarse grid") {
    auto v2 = ScalarPotential::gaussian(0.5), v1 = ScalarPotential::zero();
    const double h = 1e-3;
    auto nm = build_nu_mu(v1, v2, grid(h, 0.6, h));
    auto om = omega(v1, v2, grid(1.3, 1.6, h));
    auto rep = convolution_check(nm.nu, om.direct, 1);
    CHECK(rep.max_residual <= 1e-2 * rep.max_abs_omega);
    CHECK(rep.split_max_residual <= 1e-2 * rep.max_abs_omega);
    CHECK(om.max_deviation <= 1e-2 * rep.max_abs_omega);
}

TEST_CASE("pairing with mu is bounded by the order constant") {
    auto v2 = ScalarPotential::gaussian(0.5), v1 = ScalarPotential::zero();
    const double C = mu_order_constant(v1, v2);
    CHECK(C == doctest::Approx(0.5 * std::pow(M_PI, 1.5)).epsilon(1e-8));
    // <mu, f> for f(E) = E is int v2 - v1.
    CHECK(pair_mu(v1, v2, [](double E) { return E; }) == doctest::Approx(C).epsilon(1e-8));
    CHECK(std::abs(pair_mu(v1, v2, [](double E) { return std::sin(3 * E); })) <= 3.0 * C * (1 + 1e-9));
}

}
