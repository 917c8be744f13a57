#pragma once

#include "reslab/potentials.hpp"

#include <json.hpp>

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace reslab {

enum class SampleKind { density, cumulative };

// A sampled distribution on an energy grid. Cumulative samples hold N(E) with dN = the measure.
struct EnergyDistribution {
    std::string name;
    std::vector<double> grid;
    std::vector<double> values;
    SampleKind kind = SampleKind::density;
    double support_lo = 0.0;
    double support_hi = 0.0;
    int order = 0;
    double origin = 0.0;  // excluded point separating the two half-lines (E = 0 before shifts)
    nlohmann::json provenance = nlohmann::json::object();

    std::size_t size() const { return grid.size(); }
    double max_abs() const;
    double spacing() const;  // uniform spacing; throws ConfigError if non-uniform
    // tau_a: the same samples placed at E + a.
    EnergyDistribution shifted(double a) const;
    nlohmann::json sidecar() const;
};

enum class Side { geq, leq };

struct VolumeEstimate {
    double value = 0.0;
    double std_error = 0.0;
    std::string method;
};

// vol{x : v(x) >= E} or vol{x : v(x) <= E}.
VolumeEstimate level_set_volume(const ScalarPotential& v, double E, Side side, std::uint64_t seed = 0x5eed,
                                std::size_t qmc_points = 1u << 15);

// Throws DomainError if the radial profile is constant (|v'| < 1e-12, v != 0) on a run of samples.
void reject_plateaus(const ScalarPotential& v);

struct NuMu {
    EnergyDistribution nu_plus_1, nu_plus_2, nu_minus_1, nu_minus_2;
    EnergyDistribution mu_plus_1, mu_plus_2, mu_minus_1, mu_minus_2;
    EnergyDistribution mu;  // density samples of mu
    EnergyDistribution nu;  // cumulative samples whose Stieltjes derivative is mu
};

NuMu build_nu_mu(const ScalarPotential& v1, const ScalarPotential& v2, const std::vector<double>& grid,
                 std::uint64_t seed = 0x5eed, unsigned threads = 1);

// Branch sign: +1 above max l_plus, -1 below min l_minus; DomainError inside the forbidden band.
int branch_sign(const ScalarPotential& v1, const ScalarPotential& v2, double E);

double rho_at(const ScalarPotential& v1, const ScalarPotential& v2, double E);
// Same quantity through the cumulative level-set function.
double rho_via_level_sets(const ScalarPotential& v1, const ScalarPotential& v2, double E);
EnergyDistribution rho(const ScalarPotential& v1, const ScalarPotential& v2, const std::vector<double>& E_grid,
                       unsigned threads = 1);

// d rho / dE by direct quadrature of the defining phase-space integral.
double omega_direct_at(const ScalarPotential& v1, const ScalarPotential& v2, double E);

struct OmegaResult {
    EnergyDistribution finite_difference;
    EnergyDistribution direct;
    double max_deviation = 0.0;  // max |fd - direct|
};

OmegaResult omega(const ScalarPotential& v1, const ScalarPotential& v2, const std::vector<double>& E_grid,
                  unsigned threads = 1);

namespace kernel {
double phi(double x);
double phi_plus(double x);
double phi_minus(double x);
double phi_tilde_plus(double x);
double phi_tilde_minus(double x);
// Antiderivatives vanishing on |x| <= 1.
double Phi(double x);
double Phi_plus(double x);
double Phi_minus(double x);
}  // namespace kernel

struct Kernel {
    std::function<double(double)> k;
    std::function<double(double)> antiderivative;
};

Kernel kernel_phi();
Kernel kernel_phi_plus();
Kernel kernel_phi_minus();
Kernel kernel_phi_tilde_plus();
Kernel kernel_phi_tilde_minus();

// Cumulative form of a density (N = 0 beyond the support on both sides of E = 0).
EnergyDistribution to_cumulative(const EnergyDistribution& mu);

// (K * mu)(E) by exact product integration against piecewise-linear cumulative samples.
std::vector<double> convolve(const Kernel& K, const EnergyDistribution& mu, const std::vector<double>& E);

struct ConvolutionReport {
    int sign = 1;
    double max_residual = 0.0;
    double l1_residual = 0.0;
    double max_abs_omega = 0.0;
    double split_max_residual = 0.0;
    double shift_max_deviation = 0.0;
    std::vector<double> phi_mu;
    nlohmann::json to_json() const;
};

ConvolutionReport convolution_check(const EnergyDistribution& mu, const EnergyDistribution& omega, int sign);

// <mu, f> = int f(v2) - f(v1) dx.
double pair_mu(const ScalarPotential& v1, const ScalarPotential& v2, const std::function<double(double)>& f);
// int |v2 - v1| dx, the constant in |<mu, f>| <= C sup |f'|.
double mu_order_constant(const ScalarPotential& v1, const ScalarPotential& v2);

}  // namespace reslab
