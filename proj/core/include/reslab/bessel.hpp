#pragma once

#include "reslab/numerics.hpp"

#include <string>

namespace reslab {

enum class BesselBranch { series, continued_fraction, asymptotic };

std::string to_string(BesselBranch b);

// Modified Bessel function of the second kind K_nu(z), nu in {0, 1, 2}, principal branch.
// |z| <= 8: ascending series with logarithmic term (extended precision);
// 8 < |z| < 12: Steed-Temme continued fraction;
// |z| >= 12: asymptotic expansion truncated at its smallest term.
// Away from the series disc, |arg z| <= 0.8 pi is required.
cplx bessel_k(int nu, cplx z);

cplx bessel_k_series(int nu, cplx z);
cplx bessel_k_continued_fraction(int nu, cplx z);
cplx bessel_k_asymptotic(int nu, cplx z, int* terms_used = nullptr);

struct BesselEvaluator {
    int nu = 2;
    double series_radius = 8.0;
    double asymptotic_radius = 12.0;

    BesselBranch branch(cplx z) const;
    cplx operator()(cplx z) const;
    // |K1(z) - z K1'(z) - z K2(z)| / |z K2(z)| with K1' from a Cauchy integral on a small circle.
    static double recurrence_residual(cplx z);
};

}  // namespace reslab
