#pragma once

#include "reslab/numerics.hpp"
#include "reslab/phasespace.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace reslab {

// Samples u(origin + k * step), k = 0..n-1.
struct UniformSamples {
    double origin = 0.0;
    double step = 1.0;
    std::vector<double> values;

    double x(std::size_t k) const { return origin + static_cast<double>(k) * step; }
    double lo() const { return origin; }
    double hi() const { return x(values.size() - 1); }
    static UniformSamples from(const EnergyDistribution& d);
    static UniformSamples sample(const std::function<double(double)>& f, double lo, double hi, double step);
};

// Smooth cutoff: 1 on |y - center| <= radius - edge, smoothstep to 0 at radius.
struct FbiCutoff {
    bool enabled = true;
    double center = 0.0;
    double radius = 0.3;
    double edge = 0.1;
    double operator()(double y) const;
    FbiCutoff at(double c) const {
        FbiCutoff k = *this;
        k.center = c;
        return k;
    }
};

struct FbiValue {
    cplx value;
    double rounding_bound = 0.0;  // eps * sum of |terms|
};

// T_lambda u(x, xi) = 2^{-1/2} (lambda/pi)^{3/4} int e^{i lambda (x-y) xi - lambda (x-y)^2 / 2} chi(y) u(y) dy,
// trapezoidal rule on the sample grid.
FbiValue fbi_transform_detailed(const UniformSamples& u, double x, double xi, double lambda, const FbiCutoff& chi);
cplx fbi_transform(const UniformSamples& u, double x, double xi, double lambda, const FbiCutoff& chi);

// Throws RefinementRequired unless lambda h^2 <= 0.1 and the oscillation e^{i lambda xi y} is resolved.
void check_fbi_resolution(double step, double xi, double lambda);

struct FBIProbe {
    double x0 = 0.0;
    double xi0 = 1.0;
    std::vector<double> lambda_seq;
    FbiCutoff cutoff;
    void validate() const;
};

std::vector<double> default_lambda_sequence();

struct ClassifierOptions {
    double rate_floor = 1e-2;
    double min_r2 = 0.9;
};

enum class Decay { exponential_decay, subexponential };
std::string to_string(Decay d);

struct WavefrontVerdict {
    Decay classification = Decay::subexponential;
    double fitted_rate = 0.0;  // lambda coefficient of the selected model (negative: decay)
    double confidence = 0.0;   // R^2 of the combined fit
    double combined_rate = 0.0;
    double power_exponent = 0.0;
    double aic_linear = 0.0, aic_power = 0.0, aic_combined = 0.0;
    std::size_t resolved = 0;
    std::string rule;
    std::vector<double> lambdas;
    std::vector<double> log_abs_T;
    nlohmann::json to_json() const;
};

// Fit log|T| against lambda (linear), log lambda (power) and both (combined).
// exponential_decay iff the combined lambda coefficient is below -rate_floor, the linear model beats the
// power model by AIC and the combined fit has R^2 >= min_r2.
WavefrontVerdict classify_series(const std::vector<double>& lambdas, const std::vector<double>& abs_T,
                                 const std::vector<double>& rounding, const ClassifierOptions& opt = {});
WavefrontVerdict classify_point(const UniformSamples& u, const FBIProbe& probe, const ClassifierOptions& opt = {});

struct ScanResult {
    double xi0 = 1.0;
    std::vector<double> x;
    std::vector<WavefrontVerdict> verdicts;
    std::vector<double> flagged;
    nlohmann::json to_json() const;
    // Rows x, columns lambda, entries log|T|.
    std::string heatmap_csv() const;
};

ScanResult singular_support_scan(const UniformSamples& u, const std::vector<double>& x_grid, double xi0,
                                 const std::vector<double>& lambda_seq, const FbiCutoff& chi = {},
                                 const ClassifierOptions& opt = {}, unsigned threads = 1);

// Hausdorff distance between two point sets measured in grid cells (infinite if exactly one is empty).
double hausdorff_cells(const std::vector<double>& a, const std::vector<double>& b, double cell);

struct WitnessRow {
    double alpha = 0.0, lambda = 0.0, epsilon = 0.0, beta = 0.0, value = 0.0;
};

struct WitnessOptions {
    std::vector<double> lambda_seq;
    double alpha_radius = 0.05;
    double beta_lo = 0.8, beta_hi = 1.2;
    double chi_radius = 0.3, chi_edge = 0.1;
    double eps_target = 0.05;
    double rate_floor = 1e-2;
};

struct Witness {
    bool found = false;
    bool epsilon_decreasing = false;
    double asymptotic_rate = 0.0;
    std::string reason;
    std::vector<WitnessRow> rows;
    nlohmann::json to_json() const;
};

// Lower bounds |int e^{i lambda beta (alpha - E) - lambda (alpha - E)^2 / 2} chi(E) omega(E) dE| >= e^{-eps lambda}.
Witness probe_sequence_witness(const EnergyDistribution& omega, double E0, const WitnessOptions& opt);

}  // namespace reslab
