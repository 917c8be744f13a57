#pragma once

#include "reslab/dirac.hpp"
#include "reslab/phasespace.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace reslab {

// f(E) = exp(i lambda beta (alpha - E) - lambda (alpha - E)^2 / 2).
struct GaussianProbe {
    double alpha = 1.5;
    double beta = 1.0;
    double lambda = 100.0;
    cplx operator()(cplx E) const;
};

struct TestFunctionSpec {
    enum class Kind { polynomial, gaussian };
    PlateauCutoff chi;
    Kind kind = Kind::polynomial;
    std::vector<double> coefficients{1.0};  // f(E) = sum c_k E^k
    GaussianProbe probe;

    static TestFunctionSpec polynomial(PlateauCutoff chi, std::vector<double> coefficients);
    static TestFunctionSpec gaussian(PlateauCutoff chi, GaussianProbe probe);
    cplx f(cplx E) const;
    cplx chi_f(double E) const;
    // d/dE (chi f) on the real line.
    cplx chi_f_derivative(double E) const;
    TestFunctionSpec scaled(double a) const;
    void validate() const;
    nlohmann::json to_json() const;
};

struct TraceOptions {
    double h = 0.0;           // 0: the resolution limit for hbar
    double r_max = 12.0;
    double points_per_wavelength = 20.0;
    double remainder_tol = 0.01;
    unsigned threads = 1;
};

struct TraceValue {
    cplx value = 0.0;
    cplx remainder = 0.0;  // twice the last channel pair contribution
    bool converged = false;
    std::vector<int> kappas;
    std::vector<cplx> channel_sums;  // 2|kappa| sum_n (chi f)(E_n), per channel
    nlohmann::json to_json() const;
};

// sum over |kappa| <= kappa_max of 2|kappa| sum_n (chi f)(E_n) at theta = 0.
TraceValue functional_trace(const ScalarPotential& v, double hbar, const TestFunctionSpec& tf, int kappa_max,
                            const TraceOptions& opt = {});
// Tr (chi f)(D2) - Tr (chi f)(D1), channel by channel on a common grid.
TraceValue trace_difference(const ScalarPotential& v1, const ScalarPotential& v2, double hbar,
                            const TestFunctionSpec& tf, int kappa_max, const TraceOptions& opt = {});

struct PhaseSpaceTrace {
    cplx value = 0.0;            // through the density omega
    cplx value_level_set = 0.0;  // integration by parts against rho from level-set volumes
    double consistency = 0.0;    // relative difference of the two routes
    nlohmann::json to_json() const;
};

inline constexpr double kWeylConstant = 1.0 / 248.05021344239853;  // (2 pi)^-3

// (2 pi hbar)^-3 int (chi f)(E) d rho(E).
PhaseSpaceTrace phase_space_trace(const ScalarPotential& v1, const ScalarPotential& v2, double hbar,
                                  const TestFunctionSpec& tf);

struct ResidualRow {
    double hbar = 0.0;
    int kappa_max = 0;
    double operator_side = 0.0;
    double phase_space = 0.0;
    double residual = 0.0;
    double relative = 0.0;  // |residual| / |phase_space|
    double remainder = 0.0;
    bool converged = false;
};

struct ResidualTable {
    std::vector<ResidualRow> rows;
    double residual_order = 0.0;     // slope of log|residual| against log(1/hbar)
    double operator_slope = 0.0;
    double phase_space_slope = 0.0;
    double fitted_constant = 0.0;    // mean operator / phase-space ratio
    double max_scaled_ratio = 0.0;   // max/min of |residual| hbar^2 across rows
    nlohmann::json to_json() const;
    std::string to_csv() const;
};

ResidualTable bruneau_robert_residual(const ScalarPotential& v1, const ScalarPotential& v2,
                                      const std::vector<double>& hbar_list, const TestFunctionSpec& tf,
                                      double kappa_c = 4.0, const TraceOptions& opt = {});

// Omega = (E0 + 1 - 2b, E0 + 1 + 2b) + i(-2a, a], W = [E0 + 1 - b, E0 + 1 + b] + i(-a, a].
struct ComplexWindow {
    double E0 = 0.5;
    double a = 0.05;
    double b = 0.2;
    ComplexRect omega() const;
    ComplexRect inner() const;
    bool in_omega(cplx z) const;
    bool in_inner(cplx z) const;
    std::vector<std::string> warnings() const;
    void validate() const;
};

struct SuppressionReport {
    double c0_lower = 0.0;    // over (Omega \ W) with Im z <= 0
    double c0_full = 0.0;     // over all of Omega \ W
    double c0_lateral = 0.0;  // on the vertical sides of Omega
    bool pass = false;
    std::vector<std::string> warnings;
    nlohmann::json to_json() const;
};

// Minimum of -log|f| / lambda over a mesh of Omega \ W.
SuppressionReport suppression_check(const ComplexWindow& window, const GaussianProbe& probe, std::size_t mesh = 400);

struct LocalTraceReport {
    cplx resonance_sum = 0.0;
    cplx phase_space = 0.0;
    double ratio = 0.0;  // |resonance sum| / |phase space|
    double bound_epsilon = 0.0;
    double bound = 0.0;  // (2 pi hbar)^-3 exp(-epsilon lambda)
    bool bound_holds = false;
    bool consistent = true;
    std::size_t resonances_v1 = 0;
    std::size_t resonances_v2 = 0;
    std::string note;
    nlohmann::json to_json() const;
};

// Resonance side sum_{Res(D2) in W} f - sum_{Res(D1) in W} f against the phase-space side
// (2 pi hbar)^-3 int f chi omega dE.
LocalTraceReport local_trace_experiment(double hbar, const ComplexWindow& window, const GaussianProbe& probe,
                                        const PlateauCutoff& chi, const EnergyDistribution& omega,
                                        const ResonanceSet& res_v2, const ResonanceSet& res_v1, double epsilon,
                                        double multiplicity_scale = 1.0);

}  // namespace reslab
