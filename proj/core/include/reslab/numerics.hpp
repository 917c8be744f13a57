#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace reslab {

using cplx = std::complex<double>;

// Quintic smoothstep 10t^3 - 15t^4 + 6t^5, clamped to [0, 1].
double smoothstep5(double t);

// Fixed radial cutoff: 1 for s <= 1, 0 for s >= 2, smoothstep in between.
double cutoff_chi(double s);

// Plateau cutoff equal to 1 on [a, b] with smoothstep ramps of width w on either side.
struct PlateauCutoff {
    double a = 0.0;
    double b = 0.0;
    double w = 0.1;
    double operator()(double x) const;
    double support_lo() const { return a - w; }
    double support_hi() const { return b + w; }
};

std::vector<double> linspace(double a, double b, std::size_t n);
std::vector<double> logspace(double a, double b, std::size_t n);

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    double rss = 0.0;
    std::size_t n = 0;
};

// Ordinary least squares y = intercept + slope * x.
LinearFit fit_line(std::span<const double> x, std::span<const double> y);

// Fit log|y| against log x.
LinearFit fit_loglog(std::span<const double> x, std::span<const double> y);

struct QuadResult {
    double value = 0.0;
    double error = 0.0;
    double l1 = 0.0;
};

// Adaptive Gauss-Kronrod (15 point) on [a, b]; b may be +infinity.
QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     double rel_tol = 1e-10, unsigned max_depth = 18);

// Adaptive integration over consecutive panels [pts[k], pts[k+1]].
QuadResult integrate_panels(const std::function<double(double)>& f, std::span<const double> pts,
                            double rel_tol = 1e-10, unsigned max_depth = 18);

// Composite 20-point Gauss-Legendre on n equal panels; works for complex integrands.
cplx gauss_legendre(const std::function<cplx(double)>& f, double a, double b, std::size_t panels);
double gauss_legendre_real(const std::function<double(double)>& f, double a, double b,
                           std::size_t panels);

// All roots of g on [a, b] located by sign changes on n samples and refined by TOMS748.
std::vector<double> bracket_roots(const std::function<double(double)>& g, double a, double b,
                                  std::size_t n);

// Run fn(i) for i in [0, count) on up to `threads` workers; results are written by index.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn);

}  // namespace reslab
