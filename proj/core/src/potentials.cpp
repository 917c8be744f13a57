#include "reslab/potentials.hpp"

#include "reslab/errors.hpp"

#include <cmath>
using std::isnan;  // pchip.hpp in Boost 1.74 calls isnan unqualified
#include <boost/math/interpolators/pchip.hpp>

#include <fstream>
#include <numbers>
#include <sstream>

namespace reslab {

using nlohmann::json;

double norm(const Vec3& x) { return std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]); }

double PotentialModel::radial_derivative(double r) const {
    const double h = 1e-4 * std::max(1.0, std::abs(r));
    auto f = [&](double s) { return radial_value(std::abs(s)); };
    return (f(r - 2 * h) - 8 * f(r - h) + 8 * f(r + h) - f(r + 2 * h)) / (12 * h);
}

namespace {

constexpr double kPi = std::numbers::pi;

class ZeroModel final : public PotentialModel {
public:
    std::string kind() const override { return "zero"; }
    double radial_value(double) const override { return 0.0; }
    double radial_derivative(double) const override { return 0.0; }
    std::optional<cplx> complex_value(cplx) const override { return cplx(0.0); }
    double radius_below(double) const override { return 0.0; }
    double support_radius() const override { return 0.0; }
    json describe() const override { return {{"kind", "zero"}}; }
};

class GaussianModel final : public PotentialModel {
public:
    GaussianModel(double a, double w) : a_(a), w_(w) {}
    std::string kind() const override { return "gaussian"; }
    double radial_value(double r) const override { return a_ * std::exp(-r * r / (w_ * w_)); }
    double radial_derivative(double r) const override { return -2.0 * r / (w_ * w_) * radial_value(r); }
    std::optional<cplx> complex_value(cplx z) const override { return a_ * std::exp(-z * z / (w_ * w_)); }
    double radius_below(double level) const override {
        if (level >= std::abs(a_)) return 0.0;
        return w_ * std::sqrt(std::log(std::abs(a_) / level));
    }
    json describe() const override { return {{"kind", "gaussian"}, {"amplitude", a_}, {"width", w_}}; }

private:
    double a_, w_;
};

class AnisotropicGaussianModel final : public PotentialModel {
public:
    AnisotropicGaussianModel(double a, const Vec3& w) : a_(a), w_(w) {}
    std::string kind() const override { return "anisotropic_gaussian"; }
    bool radial() const override { return false; }
    double radial_value(double) const override {
        throw DomainError("anisotropic potential has no radial profile");
    }
    double value(const Vec3& x) const override {
        double q = 0.0;
        for (int i = 0; i < 3; ++i) q += x[i] * x[i] / (w_[i] * w_[i]);
        return a_ * std::exp(-q);
    }
    double radius_below(double level) const override {
        if (level >= std::abs(a_)) return 0.0;
        return *std::max_element(w_.begin(), w_.end()) * std::sqrt(std::log(std::abs(a_) / level));
    }
    json describe() const override {
        return {{"kind", "anisotropic_gaussian"}, {"amplitude", a_}, {"widths", w_}};
    }
    double amplitude() const { return a_; }

private:
    double a_;
    Vec3 w_;
};

class LorentzModel final : public PotentialModel {
public:
    LorentzModel(double a, double p) : a_(a), p_(p) {}
    std::string kind() const override { return "lorentz"; }
    double radial_value(double r) const override { return a_ * std::pow(1.0 + r * r, -0.5 * p_); }
    double radial_derivative(double r) const override {
        return -p_ * r * a_ * std::pow(1.0 + r * r, -0.5 * p_ - 1.0);
    }
    std::optional<cplx> complex_value(cplx z) const override { return a_ * std::pow(1.0 + z * z, -0.5 * p_); }
    double radius_below(double level) const override {
        if (level >= std::abs(a_)) return 0.0;
        const double q = std::pow(std::abs(a_) / level, 2.0 / p_) - 1.0;
        return std::sqrt(std::max(0.0, q));
    }
    json describe() const override { return {{"kind", "lorentz"}, {"amplitude", a_}, {"power", p_}}; }

private:
    double a_, p_;
};

class BumpModel final : public PotentialModel {
public:
    BumpModel(double a, double radius) : a_(a), rad_(radius) {}
    std::string kind() const override { return "bump"; }
    double radial_value(double r) const override {
        const double t = r / rad_;
        if (t >= 1.0) return 0.0;
        return a_ * std::exp(1.0 - 1.0 / (1.0 - t * t));
    }
    double radius_below(double level) const override { return level >= std::abs(a_) ? 0.0 : rad_; }
    double support_radius() const override { return rad_; }
    std::vector<double> breakpoints() const override { return {rad_}; }
    json describe() const override { return {{"kind", "bump"}, {"amplitude", a_}, {"radius", rad_}}; }

private:
    double a_, rad_;
};

class TableModel final : public PotentialModel {
public:
    TableModel(std::vector<double> r, std::vector<double> v, double tail, json source = nullptr)
        : source_(std::move(source)), r_first_(r.front()), r_last_(r.back()), v_first_(v.front()), v_last_(v.back()), tail_(tail),
          n_(r.size()), interp_(std::move(r), std::move(v)) {}
    std::string kind() const override { return "table"; }
    double radial_value(double r) const override {
        if (r <= r_first_) return v_first_;
        if (r >= r_last_) return v_last_ * std::pow(r_last_ / r, tail_);
        return interp_(r);
    }
    double radius_below(double level) const override {
        if (v_last_ == 0.0) return r_last_;
        return std::max(r_last_, r_last_ * std::pow(std::abs(v_last_) / level, 1.0 / tail_));
    }
    std::vector<double> breakpoints() const override { return {r_first_, r_last_}; }
    json describe() const override {
        json d{{"kind", "table"}, {"samples", n_}, {"r_range", {r_first_, r_last_}}, {"tail_power", tail_}};
        if (!source_.is_null()) d["tabulated_from"] = source_;
        return d;
    }

private:
    json source_;
    double r_first_, r_last_, v_first_, v_last_, tail_;
    std::size_t n_;
    boost::math::interpolators::pchip<std::vector<double>> interp_;
};

class ScaledModel final : public PotentialModel {
public:
    ScaledModel(std::shared_ptr<const PotentialModel> inner, double a) : inner_(std::move(inner)), a_(a) {}
    std::string kind() const override { return inner_->kind(); }
    bool radial() const override { return inner_->radial(); }
    double radial_value(double r) const override { return a_ * inner_->radial_value(r); }
    double value(const Vec3& x) const override { return a_ * inner_->value(x); }
    double radial_derivative(double r) const override { return a_ * inner_->radial_derivative(r); }
    std::optional<cplx> complex_value(cplx z) const override {
        auto v = inner_->complex_value(z);
        if (!v) return std::nullopt;
        return a_ * *v;
    }
    double radius_below(double level) const override {
        return a_ == 0.0 ? 0.0 : inner_->radius_below(level / std::abs(a_));
    }
    double support_radius() const override { return a_ == 0.0 ? 0.0 : inner_->support_radius(); }
    std::vector<double> breakpoints() const override { return inner_->breakpoints(); }
    json describe() const override {
        auto d = inner_->describe();
        d["scale"] = a_;
        return d;
    }

private:
    std::shared_ptr<const PotentialModel> inner_;
    double a_;
};

constexpr double kWindow = 8.0;

class MollifiedModel final : public PotentialModel {
public:
    MollifiedModel(ScalarPotential v2, double R, double tol)
        : v2_(std::move(v2)), R_(R), tol_(tol), reach_(v2_.radius_below(1e-200 * std::max(v2_.sup_abs(), 1e-300))) {}
    std::string kind() const override { return "mollified"; }
    bool radial() const override { return v2_.is_radial(); }

    double radial_value(double rho) const override {
        if (!v2_.is_radial()) throw DomainError("mollified potential of a non-radial base has no radial profile");
        const double lam = mollifier_width(rho, R_);
        const double lo = std::max({0.0, rho - kWindow * lam, R_});
        const double hi = std::min({rho + kWindow * lam, v2_.support_radius(), reach_});
        if (!(hi > lo)) return 0.0;
        auto f = [&](double s) {
            return mollifier_radial_kernel(rho, s, lam) * (1.0 - cutoff_chi(s / R_)) * v2_.radial(s);
        };
        auto pts = panel_points(lo, hi, rho);
        auto q = integrate_panels(f, pts, 1e-11);
        if (q.error > tol_ * std::max(q.l1, 1e-12 * v2_.sup_abs())) {
            std::ostringstream os;
            os << "mollification quadrature did not converge at r=" << rho << " (error " << q.error
               << ", L1 " << q.l1 << ")";
            throw NumericalError(os.str());
        }
        return q.value;
    }

    double value(const Vec3& x) const override {
        if (v2_.is_radial()) return radial_value(norm(x));
        return mollify_eval_3d(v2_, R_, x);
    }

    std::optional<cplx> complex_value(cplx rho) const override {
        if (!v2_.has_complex_extension() || !v2_.is_radial()) return std::nullopt;
        const cplx lam = std::pow(1.0 + rho * rho / (R_ * R_), -2.0);
        const double width = 10.0 * std::abs(lam);
        const double lo = std::max({0.0, rho.real() - width, R_});
        const double hi = rho.real() + width;
        if (!(hi > lo)) return cplx(0.0);
        double l1 = 0.0;
        auto f = [&](double s) {
            const cplx x = 2.0 * rho * s / (lam * lam);
            const cplx q = std::abs(x) < 1e-3 ? 1.0 - x / 2.0 + x * x / 6.0 - x * x * x / 24.0 : (1.0 - std::exp(-x)) / x;
            const cplx d = rho - s;
            const cplx k = std::sqrt(2.0 / kPi) / (lam * lam * lam) * s * s * std::exp(-d * d / (2.0 * lam * lam)) * q;
            const cplx val = k * (1.0 - cutoff_chi(s / R_)) * *v2_.complex_radial(s);
            l1 += std::abs(val);
            return val;
        };
        const std::size_t panels = 64;
        const cplx v = gauss_legendre(f, lo, hi, panels);
        const double l1_int = l1 * (hi - lo) / (40.0 * panels);
        if (std::abs(v) > 0.0 && l1_int > 1e6 * std::abs(v))
            throw NumericalError("complex continuation of the mollified potential is ill-conditioned at this point");
        return v;
    }

    double radius_below(double level) const override { return v2_.radius_below(level) + kWindow; }
    double support_radius() const override {
        return v2_.support_radius() <= R_ ? 0.0 : std::numeric_limits<double>::infinity();
    }
    json describe() const override {
        return {{"kind", "mollified"}, {"base", v2_.describe()}, {"R", R_}, {"tolerance", tol_}};
    }

    double defect(double rho) const {
        const double lam = mollifier_width(rho, R_);
        const double lo = std::max(0.0, rho - 10.0 * lam);
        const double hi = rho + 10.0 * lam;
        const double v2rho = v2_.radial(rho);
        auto diff = [&](double s) {
            if (std::abs(s - rho) < 0.25) {
                return -gauss_legendre_real([&](double t) { return v2_.derivative(t); }, rho, s, 1);
            }
            return v2rho - v2_.radial(s);
        };
        auto f = [&](double s) {
            return mollifier_radial_kernel(rho, s, lam) * (diff(s) + cutoff_chi(s / R_) * v2_.radial(s));
        };
        auto pts = panel_points(lo, hi, rho);
        return integrate_panels(f, pts, 1e-12).value;
    }

    const ScalarPotential& base() const { return v2_; }
    double R() const { return R_; }

private:
    std::vector<double> panel_points(double lo, double hi, double rho) const {
        std::vector<double> pts{lo, hi};
        for (double b : {R_, 2.0 * R_, rho}) pts.push_back(b);
        for (double b : v2_.breakpoints()) pts.push_back(b);
        std::vector<double> out;
        for (double p : pts)
            if (p >= lo && p <= hi) out.push_back(p);
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }

    ScalarPotential v2_;
    double R_, tol_, reach_;
};

std::pair<double, double> sampled_extrema(const PotentialModel& m) {
    double lo = 0.0, hi = 0.0;
    auto take = [&](double v) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    };
    if (m.radial()) {
        const double reach = std::min(1e4, std::max(10.0, m.radius_below(1e-300)));
        const double reach_lin = std::min(reach, 50.0);
        double best_r = 0.0, best_abs = -1.0;
        for (double r : linspace(0.0, reach_lin, 5001)) {
            const double v = m.radial_value(r);
            take(v);
            if (std::abs(v) > best_abs) {
                best_abs = std::abs(v);
                best_r = r;
            }
        }
        if (reach > reach_lin)
            for (double r : logspace(reach_lin, reach, 400)) take(m.radial_value(r));
        const double step = reach_lin / 5000.0;
        for (double r : linspace(std::max(0.0, best_r - step), best_r + step, 201)) take(m.radial_value(r));
    } else {
        const double reach = std::min(50.0, std::max(5.0, m.radius_below(1e-14)));
        for (int dir = 0; dir < 13; ++dir) {
            Vec3 d{static_cast<double>(dir % 3 == 0) + (dir >= 3 ? 0.5 : 0.0),
                   static_cast<double>(dir % 3 == 1) + (dir >= 6 ? 0.5 : 0.0),
                   static_cast<double>(dir % 3 == 2) + (dir >= 9 ? -0.5 : 0.0)};
            const double n = norm(d);
            for (double t : linspace(0.0, reach, 2001)) take(m.value({t * d[0] / n, t * d[1] / n, t * d[2] / n}));
        }
    }
    return {lo, hi};
}

}  // namespace

ScalarPotential::ScalarPotential() : ScalarPotential(std::make_shared<ZeroModel>(), DecayMeta{50.0, 0.95, 0.0}) {}

ScalarPotential::ScalarPotential(std::shared_ptr<const PotentialModel> model, DecayMeta meta)
    : model_(std::move(model)), meta_(meta) {
    if (!(meta_.delta > 0.0)) throw ConfigError("decay exponent delta must be positive");
    if (!(meta_.epsilon > 0.0 && meta_.epsilon < 1.0)) throw ConfigError("sector aperture epsilon must lie in (0,1)");
    if (meta_.r0 < 0.0) throw ConfigError("sector radius r0 must be nonnegative");
    auto [lo, hi] = sampled_extrema(*model_);
    if (!std::isfinite(lo) || !std::isfinite(hi)) throw DomainError("malformed potential: non-finite values");
    inf_ = lo;
    sup_ = hi;
}

ScalarPotential ScalarPotential::zero() { return ScalarPotential(); }

ScalarPotential ScalarPotential::gaussian(double amplitude, double width) {
    if (!(width > 0.0)) throw ConfigError("gaussian width must be positive");
    return ScalarPotential(std::make_shared<GaussianModel>(amplitude, width), DecayMeta{50.0, 0.95, 0.0});
}

ScalarPotential ScalarPotential::anisotropic_gaussian(double amplitude, const Vec3& widths) {
    for (double w : widths)
        if (!(w > 0.0)) throw ConfigError("gaussian widths must be positive");
    return ScalarPotential(std::make_shared<AnisotropicGaussianModel>(amplitude, widths),
                           DecayMeta{50.0, 0.95, 0.0});
}

ScalarPotential ScalarPotential::lorentz(double amplitude, double power) {
    if (!(power > 0.0)) throw ConfigError("lorentz power must be positive");
    return ScalarPotential(std::make_shared<LorentzModel>(amplitude, power), DecayMeta{power, 0.5, 0.0});
}

ScalarPotential ScalarPotential::bump(double amplitude, double radius) {
    if (!(radius > 0.0)) throw ConfigError("bump radius must be positive");
    return ScalarPotential(std::make_shared<BumpModel>(amplitude, radius), DecayMeta{50.0, 0.01, radius});
}

ScalarPotential ScalarPotential::table(std::vector<double> r, std::vector<double> v, double tail_power) {
    if (r.size() != v.size() || r.size() < 4) throw ConfigError("table potential needs at least 4 (r, v) rows");
    for (std::size_t i = 1; i < r.size(); ++i)
        if (!(r[i] > r[i - 1])) throw ConfigError("table radii must be strictly increasing");
    if (r.front() < 0.0) throw ConfigError("table radii must be nonnegative");
    for (double x : v)
        if (!std::isfinite(x)) throw DomainError("malformed potential: non-finite table value");
    if (!(tail_power > 0.0)) throw ConfigError("table tail power must be positive");
    return ScalarPotential(std::make_shared<TableModel>(std::move(r), std::move(v), tail_power),
                           DecayMeta{tail_power, 0.01, 0.0});
}

ScalarPotential tabulate(const ScalarPotential& v, double step, double level) {
    if (!v.is_radial()) throw DomainError("only radial potentials can be tabulated");
    if (!(step > 0.0) || !(level > 0.0)) throw ConfigError("tabulation needs a positive step and level");
    const double r_hi = std::max(v.radius_below(level), 8.0 * step);
    const auto n = static_cast<std::size_t>(std::ceil(r_hi / step)) + 1;
    std::vector<double> r(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
        r[i] = step * static_cast<double>(i);
        y[i] = v.radial(r[i]);
    }
    return ScalarPotential(std::make_shared<TableModel>(std::move(r), std::move(y), v.meta().delta, v.describe()),
                           v.meta());
}

double ScalarPotential::operator()(const Vec3& x) const {
    const double v = model_->value(x);
    if (!std::isfinite(v)) throw DomainError("malformed potential: non-finite value");
    return v;
}

double ScalarPotential::radial(double r) const {
    const double v = model_->radial_value(r);
    if (!std::isfinite(v)) throw DomainError("malformed potential: non-finite value");
    return v;
}

double ScalarPotential::derivative(double r) const { return model_->radial_derivative(r); }

std::optional<cplx> ScalarPotential::complex_radial(cplx z) const {
    auto v = model_->complex_value(z);
    if (v && !(std::isfinite(v->real()) && std::isfinite(v->imag())))
        throw DomainError("malformed potential: non-finite complex value");
    return v;
}

bool ScalarPotential::has_complex_extension() const { return model_->complex_value(cplx(1.0, 0.0)).has_value(); }

ScalarPotential ScalarPotential::with_meta(DecayMeta meta) const {
    ScalarPotential p = *this;
    if (!(meta.delta > 0.0) || !(meta.epsilon > 0.0 && meta.epsilon < 1.0) || meta.r0 < 0.0)
        throw ConfigError("invalid decay metadata");
    p.meta_ = meta;
    return p;
}

json ScalarPotential::describe() const {
    auto d = model_->describe();
    d["delta"] = meta_.delta;
    d["epsilon"] = meta_.epsilon;
    d["r0"] = meta_.r0;
    d["sup_v"] = sup_;
    d["inf_v"] = inf_;
    return d;
}

ScalarPotential ScalarPotential::scaled(double a) const {
    return ScalarPotential(std::make_shared<ScaledModel>(model_, a), meta_);
}

double eval_potential(const ScalarPotential& p, const Vec3& x) { return p(x); }

Thresholds thresholds(double sup_v, double inf_v) {
    return {std::max(1.0, sup_v - 1.0), std::min(-1.0, inf_v + 1.0)};
}

Thresholds thresholds(const ScalarPotential& p) { return thresholds(p.sup_v(), p.inf_v()); }

SampleSpec default_sample_spec() {
    SampleSpec s;
    s.radii = {5.0, 10.0, 20.0, 40.0};
    const double c = 1.0 / std::sqrt(3.0);
    s.directions = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {c, c, c}, {-c, c, -c}};
    s.sector_eps = {};
    return s;
}

namespace {

double fitted_exponent(const std::vector<double>& radii, const std::vector<double>& values) {
    std::vector<double> x, y;
    for (std::size_t i = 0; i < radii.size(); ++i) {
        if (values[i] > 0.0) {
            x.push_back(japanese(radii[i]));
            y.push_back(values[i]);
        }
    }
    if (x.size() < 2) return std::numeric_limits<double>::infinity();
    return -fit_loglog(x, y).slope;
}

std::vector<SectorCheck> sector_checks(const ScalarPotential& p, const SampleSpec& spec) {
    std::vector<SectorCheck> out;
    for (double e : spec.sector_eps) {
        SectorCheck c;
        c.eps = e;
        if (!p.is_radial() || !p.has_complex_extension()) {
            c.status = "declared, unchecked";
        } else if (e >= p.meta().epsilon) {
            c.status = "outside declared sector";
        } else {
            std::vector<double> vals;
            bool ok = true;
            for (double r : spec.radii) {
                for (double sgn : {1.0, -1.0}) {
                    try {
                        auto v = p.complex_radial(cplx(r, sgn * e * r));
                        if (sgn > 0) vals.push_back(std::abs(*v));
                    } catch (const NumericalError&) {
                        ok = false;
                    }
                }
            }
            if (!ok) {
                c.status = "evaluation failed";
            } else {
                c.exponent = fitted_exponent(spec.radii, vals);
                c.status = c.exponent >= p.meta().delta - 0.5 ? "pass" : "fail";
            }
        }
        out.push_back(c);
    }
    return out;
}

}  // namespace

DecayReport verify_assumption(const ScalarPotential& p1, const ScalarPotential& p2, const SampleSpec& spec,
                              double fit_tolerance) {
    if (spec.radii.size() < 3) throw ConfigError("verify_assumption: at least 3 radii are required");
    if (spec.directions.empty()) throw ConfigError("verify_assumption: no sample directions");
    DecayReport rep;
    rep.samples = spec;
    std::vector<double> m1, m2, md;
    const auto* moll = dynamic_cast<const MollifiedModel*>(&p1.model());
    const bool paired_mollifier = moll && p2.model_ptr() == moll->base().model_ptr();
    for (double r : spec.radii) {
        double a1 = 0, a2 = 0, ad = 0;
        for (auto d : spec.directions) {
            const double n = norm(d);
            const Vec3 x{r * d[0] / n, r * d[1] / n, r * d[2] / n};
            const double v1 = p1(x), v2 = p2(x);
            a1 = std::max(a1, std::abs(v1));
            a2 = std::max(a2, std::abs(v2));
            const double diff = paired_mollifier ? mollification_defect(p1, r) : v2 - v1;
            ad = std::max(ad, std::abs(diff));
        }
        m1.push_back(a1);
        m2.push_back(a2);
        md.push_back(ad);
    }
    rep.exponent_v1 = fitted_exponent(spec.radii, m1);
    rep.exponent_v2 = fitted_exponent(spec.radii, m2);
    rep.exponent_diff = fitted_exponent(spec.radii, md);
    rep.delta_v1 = p1.meta().delta;
    rep.delta_v2 = p2.meta().delta;
    rep.pass_v1 = rep.exponent_v1 >= std::min(rep.delta_v1, 3.0) - fit_tolerance;
    rep.pass_v2 = rep.exponent_v2 >= std::min(rep.delta_v2, 3.0) - fit_tolerance;
    rep.pass_diff = rep.exponent_diff > 3.0;
    rep.sectors_v1 = sector_checks(p1, spec);
    rep.sectors_v2 = sector_checks(p2, spec);
    return rep;
}

json DecayReport::to_json() const {
    auto num = [](double x) -> json { return std::isfinite(x) ? json(x) : json("inf"); };
    auto sectors = [](const std::vector<SectorCheck>& s) {
        json a = json::array();
        for (const auto& c : s) a.push_back({{"eps", c.eps}, {"status", c.status}, {"exponent", c.exponent}});
        return a;
    };
    json dirs = json::array();
    for (const auto& d : samples.directions) dirs.push_back(d);
    return {{"radii", samples.radii},
            {"directions", dirs},
            {"exponent_v1", num(exponent_v1)},
            {"exponent_v2", num(exponent_v2)},
            {"exponent_diff", num(exponent_diff)},
            {"pass_v1", pass_v1},
            {"pass_v2", pass_v2},
            {"pass_diff", pass_diff},
            {"sector_checks_v1", sectors(sectors_v1)},
            {"sector_checks_v2", sectors(sectors_v2)}};
}

double mollifier_width(double r, double R) {
    const double t = 1.0 + r * r / (R * R);
    return 1.0 / (t * t);
}

double mollifier_radial_kernel(double rho, double s, double lambda) {
    const double x = 2.0 * rho * s / (lambda * lambda);
    const double q = x < 1e-12 ? 1.0 - 0.5 * x : -std::expm1(-x) / x;
    const double d = (rho - s) / lambda;
    return std::sqrt(2.0 / kPi) / (lambda * lambda * lambda) * s * s * std::exp(-0.5 * d * d) * q;
}

double mollifier_mass(double rho, double lambda) {
    const double lo = std::max(0.0, rho - kWindow * lambda);
    const double hi = rho + kWindow * lambda;
    std::vector<double> pts{lo};
    if (rho > lo) pts.push_back(rho);
    pts.push_back(hi);
    return integrate_panels([&](double s) { return mollifier_radial_kernel(rho, s, lambda); }, pts, 1e-13).value;
}

ScalarPotential mollify_split(const ScalarPotential& v2, double R, double rel_tol, double declared_epsilon) {
    if (!(R > 0.0)) throw ConfigError("mollification radius must be positive");
    return ScalarPotential(std::make_shared<MollifiedModel>(v2, R, rel_tol), DecayMeta{4.0, declared_epsilon, 0.0});
}

double mollification_radius(const ScalarPotential& v2, double eps0) {
    if (!(eps0 > 0.0)) throw ConfigError("eps0 must be positive");
    return std::max(v2.radius_below(eps0), 1e-6);
}

double mollification_defect(const ScalarPotential& v1, double r) {
    const auto* m = dynamic_cast<const MollifiedModel*>(&v1.model());
    if (!m) throw ConfigError("mollification_defect requires a mollified potential");
    return m->defect(r);
}

double mollify_eval_3d(const ScalarPotential& v2, double R, const Vec3& x, std::size_t radial_panels) {
    const double lam = mollifier_width(norm(x), R);
    const double c0 = std::pow(2.0 * kPi, -1.5);
    const std::size_t nphi = 48;
    auto shell = [&](double t) {
        if (t == 0.0) return 0.0;
        auto over_mu = [&](double mu) {
            const double st = std::sqrt(std::max(0.0, 1.0 - mu * mu));
            double acc = 0.0;
            for (std::size_t k = 0; k < nphi; ++k) {
                const double ph = 2.0 * kPi * (static_cast<double>(k) + 0.5) / static_cast<double>(nphi);
                const Vec3 y{x[0] + lam * t * st * std::cos(ph), x[1] + lam * t * st * std::sin(ph),
                             x[2] + lam * t * mu};
                const double cut = 1.0 - cutoff_chi(norm(y) / R);
                if (cut != 0.0) acc += cut * v2(y);
            }
            return acc * 2.0 * kPi / static_cast<double>(nphi);
        };
        return c0 * t * t * std::exp(-0.5 * t * t) * gauss_legendre_real(over_mu, -1.0, 1.0, 2);
    };
    return gauss_legendre_real(shell, 0.0, kWindow, radial_panels);
}

namespace {

std::pair<std::vector<double>, std::vector<double>> read_profile_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open potential table: " + path.string());
    std::vector<double> r, v;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        for (auto& c : line)
            if (c == ',' || c == ';' || c == '\t') c = ' ';
        std::istringstream ls(line);
        double a, b;
        if (!(ls >> a >> b)) {
            if (r.empty()) continue;  // header row
            throw ConfigError("malformed row in potential table: " + path.string());
        }
        r.push_back(a);
        v.push_back(b);
    }
    return {r, v};
}

}  // namespace

ScalarPotential potential_from_json(const json& decl, const std::filesystem::path& base_dir) {
    try {
        if (!decl.is_object() || !decl.contains("kind")) throw ConfigError("potential declaration needs a 'kind'");
        const std::string kind = decl.at("kind").get<std::string>();
        ScalarPotential p;
        if (kind == "zero") {
            p = ScalarPotential::zero();
        } else if (kind == "gaussian") {
            p = ScalarPotential::gaussian(decl.value("amplitude", 0.5), decl.value("width", 1.0));
        } else if (kind == "anisotropic_gaussian") {
            p = ScalarPotential::anisotropic_gaussian(decl.value("amplitude", 0.5), decl.at("widths").get<Vec3>());
        } else if (kind == "lorentz") {
            p = ScalarPotential::lorentz(decl.value("amplitude", 1.0), decl.value("power", 4.0));
        } else if (kind == "bump") {
            p = ScalarPotential::bump(decl.value("amplitude", 0.5), decl.value("radius", 1.0));
        } else if (kind == "table") {
            std::filesystem::path file = decl.at("file").get<std::string>();
            if (file.is_relative()) file = base_dir / file;
            if (!std::filesystem::exists(file)) throw ConfigError("potential table not found: " + file.string());
            auto [r, v] = read_profile_csv(file);
            p = ScalarPotential::table(std::move(r), std::move(v), decl.value("tail_power", 4.0));
        } else if (kind == "mollified") {
            auto base = potential_from_json(decl.at("base"), base_dir);
            double R;
            if (decl.contains("R")) {
                R = decl.at("R").get<double>();
            } else if (decl.contains("epsilon0")) {
                R = mollification_radius(base, decl.at("epsilon0").get<double>());
            } else {
                throw ConfigError("mollified potential needs 'R' or 'epsilon0'");
            }
            p = mollify_split(base, R, decl.value("tolerance", 1e-8), decl.value("sector_epsilon", 0.02));
        } else {
            throw ConfigError("unknown potential kind: " + kind);
        }
        if (decl.contains("delta") || decl.contains("epsilon") || decl.contains("r0")) {
            DecayMeta m = p.meta();
            m.delta = decl.value("delta", m.delta);
            m.epsilon = decl.value("epsilon", m.epsilon);
            m.r0 = decl.value("r0", m.r0);
            p = p.with_meta(m);
        }
        return p;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("invalid potential declaration: ") + e.what());
    }
}

}  // namespace reslab
