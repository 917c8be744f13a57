#pragma once

#include "reslab/potentials.hpp"

#include <json.hpp>

#include <array>
#include <functional>
#include <string>
#include <vector>

namespace reslab {

// Global complex dilation x -> (1 + theta) x.
struct DistortionMap {
    cplx theta = 0.0;
    double sector_epsilon = 0.5;

    static double max_modulus(double epsilon);
    // Throws DomainError unless |theta| <= eps / sqrt(1 + eps^2) and Im theta >= 0.
    void validate() const;
    cplx scale() const { return 1.0 + theta; }
    static constexpr double jacobian_power = 1.5;
};

struct CurvePoint {
    double lambda = 0.0;
    cplx plus;
    cplx minus;
};

// Both branches of z = +-(lambda / (1 + theta)^2 + 1)^(1/2).
std::vector<CurvePoint> essential_curve(cplx theta, const std::vector<double>& lambda_grid);
// Euclidean distance from z to the branch of the curve on the side of Re z.
double distance_to_curve(cplx z, cplx theta);
// True if z lies strictly between the real axis and the curve (the region uncovered by the dilation).
bool uncovered_by(cplx z, cplx theta);

struct ComplexRect {
    double re_lo = 0.0;
    double re_hi = 0.0;
    double im_lo = 0.0;
    double im_hi = 0.0;  // exclusive upper edge
    bool contains(cplx z) const {
        return z.real() >= re_lo && z.real() <= re_hi && z.imag() >= im_lo && z.imag() < im_hi;
    }
    nlohmann::json to_json() const;
};

// Minimum distance from the closed rectangle to the curve, negative if they intersect.
double window_clearance(const ComplexRect& w, cplx theta);

struct GridSpec {
    double h = 0.0;               // 0: choose from points_per_wavelength
    double r_max = 0.0;           // 0: choose from the absorption rule
    double points_per_wavelength = 20.0;
    double absorb_decades = 6.0;  // decay of outgoing waves across the dilated tail
    double r_max_cap = 8.0;
    double core_level = 1e-3;     // core radius: |v| <= core_level * sup|v| beyond it
};

// Channel system on a staggered grid: upper component at i*h, lower at (i - 1/2)h, interleaved.
// Row 2(i-1) is the lower component at (i - 1/2)h, row 2i - 1 the upper component at i*h.
struct DistortedChannelMatrix {
    int kappa = -1;
    double hbar = 0.1;
    cplx theta = 0.0;
    double h = 0.0;
    double r_max = 0.0;
    std::size_t points = 0;
    static constexpr int bandwidth = 3;
    std::vector<std::array<cplx, 2 * bandwidth + 1>> band;  // band[i][d + 3] = M(i, i + d)

    std::size_t dim() const { return 2 * points; }
    cplx at(std::size_t i, std::size_t j) const;
    std::vector<cplx> dense_row_major() const;
    // max |M - M^T| relative to max |M|; the complex-symmetric structure makes this zero.
    double symmetry_residual() const;
    // max |M - M^H| relative to max |M|; zero at theta = 0 for a real potential.
    double hermitian_residual() const;
    std::vector<double> upper_grid() const;
};

// Smallest admissible step at energy about 2 for the given points per wavelength.
double max_step(double hbar, double points_per_wavelength = 20.0);

DistortedChannelMatrix assemble_channel(const ScalarPotential& v, int kappa, double hbar, cplx theta,
                                        double h, double r_max, double points_per_wavelength = 20.0);

// Potential values v((1 + theta) r) at the upper (i h) and lower ((i - 1/2) h) grid points.
struct ChannelSamples {
    cplx theta = 0.0;
    double h = 0.0;
    std::vector<cplx> upper;
    std::vector<cplx> lower;
};

ChannelSamples sample_channel_potential(const ScalarPotential& v, cplx theta, double h, double r_max);
DistortedChannelMatrix assemble_channel(const ChannelSamples& samples, int kappa, double hbar,
                                        double points_per_wavelength = 20.0);

// All eigenvalues by the dense non-Hermitian QR algorithm.
std::vector<cplx> channel_eigenvalues(const DistortedChannelMatrix& m);
// Eigenvalue nearest to z0 by shifted inverse iteration with complex-symmetric Rayleigh updates.
cplx refine_eigenvalue(const DistortedChannelMatrix& m, cplx z0, int max_iter = 40);
// Real eigenvalues in [lo, hi] at theta = 0.
std::vector<double> channel_eigenvalues_real(const DistortedChannelMatrix& m, double lo, double hi);

struct ResonanceEntry {
    cplx z;
    int multiplicity = 0;        // 2|kappa| times the cluster size
    int algebraic = 1;
    int kappa = 0;
    std::array<cplx, 2> theta_pair{};
    double stability_gap = 0.0;  // |z(theta1) - z(theta2)|
    double grid_shift = 0.0;     // shift under halving h
    double rmax_shift = 0.0;     // shift under r_max * 1.25
    double curve_distance = 0.0; // min over the pair
    bool certified = false;
};

struct ChannelFailure {
    int kappa = 0;
    std::string message;
};

struct ResonanceOptions {
    GridSpec grid;
    double stability_gap = 1e-4;
    double curve_margin = 1e-3;
    double cluster_tol = 1e-6;
    double certify_tol = 1e-4;
    bool certify = true;
    unsigned threads = 1;
};

struct ResonanceSet {
    std::vector<ResonanceEntry> entries;
    ComplexRect window;
    std::array<cplx, 2> theta_pair{};
    int kappa_max = 0;
    double hbar = 0.0;
    double h = 0.0;
    double r_max = 0.0;
    double window_clearance = 0.0;  // min over the pair; negative means the window meets a curve
    bool window_admissible = false;
    std::vector<ChannelFailure> failures;
    std::size_t candidates = 0;  // eigenvalues in the window before the stability test

    bool partial() const { return !failures.empty(); }
    // Sum of multiplicities over certified entries.
    int count() const;
    nlohmann::json to_json() const;
    std::string to_csv() const;
};

// Step and outer radius from the grid rule for the given parameters.
std::pair<double, double> resolve_grid(const ScalarPotential& v, double hbar, const ComplexRect& window,
                                       const std::array<cplx, 2>& theta_pair, const GridSpec& spec);

ResonanceSet resonances(const ScalarPotential& v, double hbar, cplx theta1, cplx theta2, const ComplexRect& window,
                        int kappa_max, const ResonanceOptions& opt = {});

struct ScalingRow {
    double hbar = 0.0;
    int kappa_max = 0;
    int count = 0;
    bool partial = false;
    double seconds = 0.0;
};

struct ScalingTable {
    std::vector<ScalingRow> rows;
    double slope = 0.0;      // fit of log N against log(1/hbar)
    double intercept = 0.0;
    double halving_ratio = 0.0;  // N(last) / N(second to last)
    std::vector<ResonanceSet> sets;
    nlohmann::json to_json() const;
    std::string to_csv() const;
};

// kappa_max = ceil(c / hbar).
int kappa_max_rule(double c, double hbar);

ScalingTable count_scaling(const ScalarPotential& v, const std::vector<double>& hbar_list, const ComplexRect& window,
                           cplx theta1, cplx theta2, double kappa_c = 3.0, const ResonanceOptions& opt = {});

}  // namespace reslab
