#pragma once

#include "reslab/numerics.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace reslab {

using Vec3 = std::array<double, 3>;

double norm(const Vec3& x);
inline double japanese(double r) { return std::sqrt(1.0 + r * r); }

// Decay and analyticity metadata: |v| <= C<x>^-delta, analytic in the sector of half-aperture epsilon
// outside |x| <= r0.
struct DecayMeta {
    double delta = 4.0;
    double epsilon = 0.5;
    double r0 = 0.0;
};

class PotentialModel {
public:
    virtual ~PotentialModel() = default;
    virtual std::string kind() const = 0;
    virtual bool radial() const { return true; }
    virtual double radial_value(double r) const = 0;
    virtual double value(const Vec3& x) const { return radial_value(norm(x)); }
    virtual double radial_derivative(double r) const;
    virtual std::optional<cplx> complex_value(cplx) const { return std::nullopt; }
    // |v(x)| <= level whenever |x| >= the returned radius.
    virtual double radius_below(double level) const = 0;
    // v vanishes identically for |x| >= support_radius().
    virtual double support_radius() const { return std::numeric_limits<double>::infinity(); }
    // Radii where the profile is not smooth.
    virtual std::vector<double> breakpoints() const { return {}; }
    virtual nlohmann::json describe() const = 0;
};

class ScalarPotential {
public:
    ScalarPotential();
    ScalarPotential(std::shared_ptr<const PotentialModel> model, DecayMeta meta);

    static ScalarPotential zero();
    static ScalarPotential gaussian(double amplitude, double width = 1.0);
    static ScalarPotential anisotropic_gaussian(double amplitude, const Vec3& widths);
    // amplitude * (1 + r^2)^(-power/2)
    static ScalarPotential lorentz(double amplitude, double power);
    // amplitude * exp(1 - 1/(1 - (r/radius)^2)) inside the ball, 0 outside.
    static ScalarPotential bump(double amplitude, double radius);
    // Monotone cubic interpolation of (r, v) samples with a power tail beyond the last sample.
    static ScalarPotential table(std::vector<double> r, std::vector<double> v, double tail_power);

    // Evaluation; throws DomainError on a non-finite value.
    double operator()(const Vec3& x) const;
    double radial(double r) const;
    double derivative(double r) const;
    std::optional<cplx> complex_radial(cplx z) const;
    bool is_radial() const { return model_->radial(); }
    bool has_complex_extension() const;

    double sup_v() const { return sup_; }
    double inf_v() const { return inf_; }
    double sup_abs() const { return std::max(std::abs(sup_), std::abs(inf_)); }
    const DecayMeta& meta() const { return meta_; }
    ScalarPotential with_meta(DecayMeta meta) const;
    std::string kind() const { return model_->kind(); }
    double radius_below(double level) const { return model_->radius_below(level); }
    double support_radius() const { return model_->support_radius(); }
    std::vector<double> breakpoints() const { return model_->breakpoints(); }
    nlohmann::json describe() const;
    const PotentialModel& model() const { return *model_; }
    std::shared_ptr<const PotentialModel> model_ptr() const { return model_; }

    // a * v as a new potential.
    ScalarPotential scaled(double a) const;

private:
    std::shared_ptr<const PotentialModel> model_;
    DecayMeta meta_;
    double sup_ = 0.0;
    double inf_ = 0.0;
};

double eval_potential(const ScalarPotential& p, const Vec3& x);

struct Thresholds {
    double l_plus = 1.0;
    double l_minus = -1.0;
};

Thresholds thresholds(const ScalarPotential& p);
Thresholds thresholds(double sup_v, double inf_v);

struct SampleSpec {
    std::vector<double> radii;
    std::vector<Vec3> directions;
    std::vector<double> sector_eps;
};

SampleSpec default_sample_spec();

struct SectorCheck {
    double eps = 0.0;
    std::string status;
    double exponent = 0.0;
};

struct DecayReport {
    SampleSpec samples;
    double exponent_v1 = 0.0;
    double exponent_v2 = 0.0;
    double exponent_diff = 0.0;
    double delta_v1 = 0.0;
    double delta_v2 = 0.0;
    bool pass_v1 = false;
    bool pass_v2 = false;
    bool pass_diff = false;
    std::vector<SectorCheck> sectors_v1;
    std::vector<SectorCheck> sectors_v2;
    bool pass() const { return pass_v1 && pass_v2 && pass_diff; }
    nlohmann::json to_json() const;
};

// Log-log fits of max over directions of |v_j| and |v2 - v1| against <r>.
DecayReport verify_assumption(const ScalarPotential& p1, const ScalarPotential& p2, const SampleSpec& spec,
                              double fit_tolerance = 0.2);

// Radial kernel of the variable-width Gaussian average: v1(rho) = int k(rho, s) g(s) ds.
double mollifier_radial_kernel(double rho, double s, double lambda);
// int k(rho, s) ds over the quadrature window; equals 1 up to the Gaussian tail.
double mollifier_mass(double rho, double lambda);
// Local width <x / R>^-4.
double mollifier_width(double r, double R);

// v1 = K_R * ((1 - chi(./R)) v2) as a quadrature-backed potential.
ScalarPotential mollify_split(const ScalarPotential& v2, double R, double rel_tol = 1e-8,
                              double declared_epsilon = 0.02);
// Smallest R with sup_{|y| > R} |v2(y)| <= eps0.
double mollification_radius(const ScalarPotential& v2, double eps0);
// v2 - v1 evaluated without cancellation; v1 must come from mollify_split.
double mollification_defect(const ScalarPotential& v1, double r);
// Direct three-dimensional product quadrature of the mollification at x (cross-check route).
double mollify_eval_3d(const ScalarPotential& v2, double R, const Vec3& x, std::size_t radial_panels = 6);

// Monotone cubic table of a radial potential on [0, radius_below(level)] with the declared decay tail.
ScalarPotential tabulate(const ScalarPotential& v, double step = 2e-3, double level = 1e-16);

// Potential declarations: {"kind": "gaussian"|"anisotropic_gaussian"|"lorentz"|"bump"|"table"|"mollified"|"zero", ...}.
ScalarPotential potential_from_json(const nlohmann::json& decl, const std::filesystem::path& base_dir = {});

}  // namespace reslab
