#pragma once

#include "reslab/numerics.hpp"

#include <json.hpp>

#include <vector>

namespace reslab {

// Normalization constant of F[phi~+](xi) = -C0 e^{i xi} K2(i xi) / (i xi), unitary Fourier convention
// F f(xi) = (2 pi)^-1/2 int f(x) e^{-i x xi} dx. Calibrated once against the pairing at xi0 = 10;
// agrees with -4 sqrt(2 pi).
inline constexpr double kSymbolC0 = -10.026513098524001;

// sign = +1 for F[phi~+], -1 for F[phi~-] (obtained from phi~-(x) = -phi~+(-x)).
cplx symbol_eval(int sign, double xi, double C0 = kSymbolC0);
// Holomorphic continuation off the real axis (used for Cauchy derivatives).
cplx symbol_eval_complex(int sign, cplx xi, double C0 = kSymbolC0);

// The kernels phi~+- themselves.
double phi_tilde(int sign, double x);

struct PairingSides {
    double xi0 = 0.0;
    cplx symbol_side;  // int a(xi) psi(xi) dxi
    cplx kernel_side;  // int phi~(x) (F psi)(x) dx
    double relative_difference = 0.0;
};

// Two-sided pairing <F phi~, psi> = <phi~, F psi> with psi(xi) = exp(-(xi - xi0)^2 / 2); |xi0| >= 9.5.
PairingSides pairing_oracle(int sign, double xi0, double C0 = kSymbolC0);

// C0 such that both sides of the pairing agree at xi0 (complex; the imaginary part should vanish).
cplx calibrate_symbol_constant(double xi0 = 10.0);

// D^N a(xi) by a Cauchy integral on the circle of radius (1 + |xi|) / 2.
cplx symbol_derivative(int sign, double xi, int N, int nodes = 128);

struct SymbolCertificate {
    int sign = 1;
    double order_claimed = -2.5;
    double fit_slope = 0.0;
    double fit_r2 = 0.0;
    bool order_pass = false;  // fit_slope within 0.05 of order_claimed
    double ellipticity_floor = 0.0;  // min |a| (1 + |xi|)^{5/2}
    double upper_constant = 0.0;     // max |a| (1 + |xi|)^{5/2}
    bool floor_pass = false;         // floor >= 1e-6
    double validity_radius = 0.0;
    double observed_floor = 0.0;     // min |a| (1 + |xi|)^{-fit_slope}
    double observed_upper = 0.0;
    // Growth of |D^N a| (1+|xi|)^{N-m} / (2^{N+1} N!) in log xi, for m claimed and m fitted.
    double derivative_slope_claimed[2] = {0.0, 0.0};
    double derivative_slope_fitted[2] = {0.0, 0.0};
    double derivative_constant_fitted[2] = {0.0, 0.0};
    std::vector<double> xi;
    std::vector<double> abs_a;
    std::vector<double> residuals;
    nlohmann::json to_json() const;
};

SymbolCertificate decay_and_ellipticity(int sign, const std::vector<double>& xi_samples);

}  // namespace reslab
