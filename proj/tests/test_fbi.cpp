#include "reslab/errors.hpp"
#include "reslab/fbi.hpp"

#include <doctest.h>

#include <cmath>

using namespace reslab;

namespace {

UniformSamples gaussian_samples(double step) {
    return UniformSamples::sample([](double y) { return std::exp(-0.5 * y * y); }, -6.0, 6.0, step);
}

// Heaviside with the midpoint value at the jump.
UniformSamples heaviside_samples(double step, double lo = -6.0, double hi = 6.0) {
    return UniformSamples::sample([](double y) { return y > 0.0 ? 1.0 : (y == 0.0 ? 0.5 : 0.0); }, lo, hi, step);
}

FbiCutoff no_cutoff() {
    FbiCutoff c;
    c.enabled = false;
    return c;
}

}  // namespace

TEST_SUITE("fbi") {

TEST_CASE("zero input transforms to zero") {
    auto u = UniformSamples::sample([](double) { return 0.0; }, -2.0, 2.0, 1e-3);
    CHECK(fbi_transform(u, 0.0, 1.0, 100.0, {}) == cplx(0.0, 0.0));
}

TEST_CASE("Gaussian input against the closed form") {
    auto u = gaussian_samples(1e-3);
    // 2^{-1/2} (lam/pi)^{3/4} sqrt(2 pi / (lam + 1)) exp(-lam^2 / (2 (lam + 1)))
    CHECK(std::abs(fbi_transform(u, 0.0, 1.0, 10.0, no_cutoff())) ==
          doctest::Approx(0.0135191803720976650).epsilon(1e-6));
    const auto v = fbi_transform_detailed(u, 0.0, 1.0, 100.0, no_cutoff());
    CHECK(std::abs(std::abs(v.value) - 7.4786811562204957e-22) <= std::max(1e-6, v.rounding_bound));
}

TEST_CASE("Heaviside input against the erfc closed form") {
    auto u = heaviside_samples(1e-4);
    CHECK(std::abs(fbi_transform(u, 0.0, 1.0, 100.0, no_cutoff())) ==
          doctest::Approx(0.0957370179325163325).epsilon(1e-6));
    auto fine = heaviside_samples(1e-5, -3.0, 3.0);
    CHECK(std::abs(fbi_transform(fine, 0.0, 1.0, 400.0, no_cutoff())) ==
          doctest::Approx(0.0671738448870504896).epsilon(1e-6));
    CHECK(std::abs(fbi_transform(u, 0.0, -1.0, 100.0, no_cutoff())) ==
          doctest::Approx(0.0957370179325163325).epsilon(1e-6));
}

TEST_CASE("resolution guard") {
    CHECK_THROWS_AS(check_fbi_resolution(0.1, 1.0, 100.0), RefinementRequired);
    CHECK_NOTHROW(check_fbi_resolution(1e-3, 1.0, 500.0));
}

TEST_CASE("probe validation") {
    FBIProbe p;
    p.lambda_seq = {50, 60, 70};
    CHECK_THROWS_AS(p.validate(), ConfigError);
    p.lambda_seq = default_lambda_sequence();
    CHECK_NOTHROW(p.validate());
    CHECK(p.lambda_seq.size() >= 10);
}

TEST_CASE("classification of the oracle inputs") {
    FBIProbe p;
    p.lambda_seq = default_lambda_sequence();
    p.cutoff.center = 0.0;
    auto g = classify_point(gaussian_samples(1e-3), p);
    CHECK(g.classification == Decay::exponential_decay);
    auto h = classify_point(heaviside_samples(1e-3), p);
    CHECK(h.classification == Decay::subexponential);
    p.xi0 = -1.0;
    CHECK(classify_point(heaviside_samples(1e-3), p).classification == Decay::subexponential);

    FBIProbe far;
    far.x0 = 5.0;
    far.lambda_seq = default_lambda_sequence();
    far.cutoff.center = 5.0;
    CHECK(classify_point(heaviside_samples(1e-3, -6.0, 8.0), far).classification == Decay::exponential_decay);
}

TEST_CASE("classification is invariant under scaling the input") {
    FBIProbe p;
    p.lambda_seq = default_lambda_sequence();
    auto u = heaviside_samples(1e-3);
    auto a = classify_point(u, p);
    for (auto& x : u.values) x *= -37.0;
    auto b = classify_point(u, p);
    CHECK(a.classification == b.classification);
    CHECK(a.combined_rate == doctest::Approx(b.combined_rate).epsilon(1e-9));
}

TEST_CASE("refining the grid keeps exponential decay") {
    FBIProbe p;
    p.lambda_seq = default_lambda_sequence();
    for (double h : {2e-3, 1e-3, 5e-4}) CHECK(classify_point(gaussian_samples(h), p).classification == Decay::exponential_decay);
}

TEST_CASE("scan of a smooth Gaussian flags nothing away from the margins") {
    auto u = gaussian_samples(1e-3);
    auto s = singular_support_scan(u, linspace(-2.0, 2.0, 21), 1.0, default_lambda_sequence());
    CHECK(s.flagged.empty());
}

TEST_CASE("scan is shift equivariant") {
    auto u = heaviside_samples(1e-3, -3.0, 3.0);
    auto v = u;
    v.origin += 1.0;
    auto xs = linspace(-0.5, 0.5, 11);
    std::vector<double> xs1;
    for (double x : xs) xs1.push_back(x + 1.0);
    auto a = singular_support_scan(u, xs, 1.0, default_lambda_sequence());
    auto b = singular_support_scan(v, xs1, 1.0, default_lambda_sequence());
    REQUIRE(a.flagged.size() == b.flagged.size());
    for (std::size_t i = 0; i < a.flagged.size(); ++i) CHECK(b.flagged[i] == doctest::Approx(a.flagged[i] + 1.0));
}

TEST_CASE("Hausdorff distance in cells") {
    CHECK(hausdorff_cells({1.0, 1.1}, {1.0, 1.1}, 0.1) == 0.0);
    CHECK(hausdorff_cells({1.0}, {1.2}, 0.1) == doctest::Approx(2.0));
    CHECK(std::isinf(hausdorff_cells({}, {1.0}, 0.1)));
    CHECK(hausdorff_cells({}, {}, 0.1) == 0.0);
}

TEST_CASE("witness search fails on a vanishing density") {
    EnergyDistribution om;
    om.kind = SampleKind::density;
    for (int k = 0; k <= 900; ++k) {
        om.grid.push_back(1.05 + k * 1e-3);
        om.values.push_back(0.0);
    }
    WitnessOptions o;
    o.lambda_seq = {50, 100, 200, 400};
    CHECK_FALSE(probe_sequence_witness(om, 1.5, o).found);
}

}
