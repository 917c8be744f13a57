#include "reslab/bessel.hpp"
#include "reslab/errors.hpp"
#include "reslab/symbols.hpp"

#include <doctest.h>

#include <cmath>

using namespace reslab;

namespace {
bool close(cplx a, cplx b, double rel) { return std::abs(a - b) <= rel * std::abs(b); }
}  // namespace

TEST_SUITE("symbols") {

TEST_CASE("K_nu against reference values") {
    struct Ref {
        int nu;
        cplx z;
        cplx k;
    };
    const Ref refs[] = {
        {0, 0.5, 0.92441907122766586},
        {0, 5.0, 0.0036910983340425943},
        {1, 1.0, 0.60190723019723457},
        {1, {2, 3}, {-0.086499976481281729, 0.039061434005214472}},
        {2, 1.0, 1.6248388986351775},
        {2, 5.0, 0.0053089437122234600},
        {2, {2, 3}, {-0.091555549790228598, 0.079891572474302521}},
        {2, {-1, 4}, {0.97052024714243382, 1.2532079827202089}},
    };
    for (const auto& r : refs) CHECK(close(bessel_k(r.nu, r.z), r.k, 1e-12));
}

TEST_CASE("branches agree where they overlap") {
    for (double r : {8.0, 12.0})
        for (double a : {0.0, 0.5, 1.0, 1.5707}) {
            const cplx z = std::polar(r, a);
            const cplx s = r <= 8 ? bessel_k_series(2, z) : bessel_k_continued_fraction(2, z);
            const cplx c = r <= 8 ? bessel_k_continued_fraction(2, z) : bessel_k_asymptotic(2, z);
            CHECK(close(s, c, 1e-11));
        }
}

TEST_CASE("three-term recurrence residual") {
    for (double r : {0.5, 3.0, 9.0, 20.0, 200.0})
        for (double a : {0.0, 0.8, 1.5707}) CHECK(BesselEvaluator::recurrence_residual(std::polar(r, a)) <= 1e-10);
}

TEST_CASE("singularity at the origin") { CHECK_THROWS_AS(bessel_k(2, 0.0), SingularityError); }

TEST_CASE("symbol constant matches -4 sqrt(2 pi)") {
    const cplx c0 = calibrate_symbol_constant(10.0);
    CHECK(c0.real() == doctest::Approx(-4.0 * std::sqrt(2.0 * M_PI)).epsilon(1e-8));
    CHECK(std::abs(c0.imag()) < 1e-8);
    CHECK(kSymbolC0 == doctest::Approx(-10.026513098524002).epsilon(1e-14));
}

TEST_CASE("pairing oracle") {
    for (double x0 : {10.0, 15.0, 25.0, -12.0})
        for (int s : {1, -1}) CHECK(pairing_oracle(s, x0).relative_difference <= 1e-6);
}

TEST_CASE("symbols of the two kernels are related by reflection") {
    for (double xi : {20.0, 150.0}) CHECK(close(symbol_eval(-1, xi), -symbol_eval(1, -xi), 1e-12));
}

TEST_CASE("certificate: ellipticity and the large-argument asymptotics") {
    const auto cert = decay_and_ellipticity(1, logspace(20.0, 2000.0, 40));
    CHECK(cert.floor_pass);
    CHECK(cert.ellipticity_floor > 0.0);
    CHECK(cert.observed_floor > 0.0);
    // e^{i xi} K2(i xi) / (i xi) behaves like xi^{-3/2}.
    CHECK(cert.fit_slope == doctest::Approx(-1.5).epsilon(0.02));
    CHECK(cert.fit_r2 > 0.999);
    CHECK(std::abs(cert.derivative_slope_fitted[0]) < 0.1);
}

TEST_CASE("Cauchy derivative against a finite difference") {
    const double xi = 40.0, h = 1e-3;
    const cplx fd = (symbol_eval(1, xi + h) - symbol_eval(1, xi - h)) / (2 * h);
    CHECK(close(symbol_derivative(1, xi, 1), fd, 1e-5));
}

}
