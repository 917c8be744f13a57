#include "reslab/traces.hpp"

#include "reslab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace reslab {

using nlohmann::json;

namespace {

json cjson(cplx z) { return {{"re", z.real()}, {"im", z.imag()}}; }

double smoothstep5_derivative(double t) {
    if (t <= 0.0 || t >= 1.0) return 0.0;
    return 30.0 * t * t * (1.0 - t) * (1.0 - t);
}

double plateau_derivative(const PlateauCutoff& c, double x) {
    if (c.w <= 0.0 || (x >= c.a && x <= c.b)) return 0.0;
    if (x < c.a) return smoothstep5_derivative((x - (c.a - c.w)) / c.w) / c.w;
    return -smoothstep5_derivative((x - c.b) / c.w) / c.w;
}

}  // namespace

cplx GaussianProbe::operator()(cplx E) const {
    const cplx d = alpha - E;
    return std::exp(cplx(0.0, lambda * beta) * d - 0.5 * lambda * d * d);
}

TestFunctionSpec TestFunctionSpec::polynomial(PlateauCutoff chi, std::vector<double> coefficients) {
    TestFunctionSpec t;
    t.chi = chi;
    t.kind = Kind::polynomial;
    t.coefficients = std::move(coefficients);
    t.validate();
    return t;
}

TestFunctionSpec TestFunctionSpec::gaussian(PlateauCutoff chi, GaussianProbe probe) {
    TestFunctionSpec t;
    t.chi = chi;
    t.kind = Kind::gaussian;
    t.probe = probe;
    t.validate();
    return t;
}

void TestFunctionSpec::validate() const {
    if (!(chi.b >= chi.a) || !(chi.w > 0.0)) throw ConfigError("cutoff needs a <= b and a positive ramp width");
    if (kind == Kind::polynomial && coefficients.empty()) throw ConfigError("polynomial test function has no coefficients");
    if (kind == Kind::gaussian && !(probe.lambda > 0.0)) throw ConfigError("probe lambda must be positive");
}

cplx TestFunctionSpec::f(cplx E) const {
    if (kind == Kind::gaussian) return probe(E);
    cplx acc = 0.0;
    for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) acc = acc * E + *it;
    return acc;
}

cplx TestFunctionSpec::chi_f(double E) const {
    const double c = chi(E);
    return c == 0.0 ? cplx(0.0) : c * f(E);
}

cplx TestFunctionSpec::chi_f_derivative(double E) const {
    cplx fp;
    if (kind == Kind::gaussian) {
        const double d = probe.alpha - E;
        fp = probe(E) * (cplx(0.0, -probe.lambda * probe.beta) + probe.lambda * d);
    } else {
        fp = 0.0;
        for (std::size_t k = coefficients.size(); k-- > 1;) fp = fp * E + static_cast<double>(k) * coefficients[k];
    }
    return plateau_derivative(chi, E) * f(E) + chi(E) * fp;
}

TestFunctionSpec TestFunctionSpec::scaled(double a) const {
    if (kind == Kind::gaussian) throw ConfigError("scaling is defined for polynomial test functions");
    auto t = *this;
    for (auto& c : t.coefficients) c *= a;
    return t;
}

json TestFunctionSpec::to_json() const {
    json j{{"chi", {{"a", chi.a}, {"b", chi.b}, {"w", chi.w}}}};
    if (kind == Kind::polynomial)
        j["f"] = {{"kind", "polynomial"}, {"coefficients", coefficients}};
    else
        j["f"] = {{"kind", "gaussian"}, {"alpha", probe.alpha}, {"beta", probe.beta}, {"lambda", probe.lambda}};
    return j;
}

json TraceValue::to_json() const {
    json ch = json::array();
    for (std::size_t i = 0; i < kappas.size(); ++i) ch.push_back({{"kappa", kappas[i]}, {"sum", cjson(channel_sums[i])}});
    return {{"value", cjson(value)}, {"remainder", cjson(remainder)}, {"converged", converged}, {"channels", ch}};
}

namespace {

std::vector<int> channel_order(int kappa_max) {
    if (kappa_max < 1) throw ConfigError("kappa_max must be at least 1");
    std::vector<int> k;
    for (int j = 1; j <= kappa_max; ++j) {
        k.push_back(-j);
        k.push_back(j);
    }
    return k;
}

double trace_step(double hbar, const TraceOptions& opt) {
    if (!(hbar > 0.0)) throw ConfigError("hbar must be positive");
    if (!(opt.r_max > 0.0)) throw ConfigError("r_max must be positive");
    const double hmax = opt.h > 0.0 ? opt.h : max_step(hbar, opt.points_per_wavelength);
    return opt.r_max / std::ceil(opt.r_max / hmax - 1e-9);
}

cplx spectral_sum(const ChannelSamples& s, int kappa, double hbar, const TestFunctionSpec& tf, double ppw) {
    const auto m = assemble_channel(s, kappa, hbar, ppw);
    const auto ev = channel_eigenvalues_real(m, tf.chi.support_lo(), tf.chi.support_hi());
    cplx acc = 0.0;
    for (double e : ev) acc += tf.chi_f(e);
    return acc;
}

TraceValue assemble_trace(const std::vector<int>& kappas, std::vector<cplx> sums, double tol) {
    TraceValue t;
    t.kappas = kappas;
    t.channel_sums = std::move(sums);
    for (const auto& c : t.channel_sums) t.value += c;
    const std::size_t n = t.channel_sums.size();
    t.remainder = 2.0 * (t.channel_sums[n - 1] + t.channel_sums[n - 2]);
    t.converged = std::abs(t.remainder) <= tol * std::abs(t.value);
    return t;
}

}  // namespace

TraceValue functional_trace(const ScalarPotential& v, double hbar, const TestFunctionSpec& tf, int kappa_max,
                            const TraceOptions& opt) {
    tf.validate();
    const auto kappas = channel_order(kappa_max);
    const double h = trace_step(hbar, opt);
    const auto s = sample_channel_potential(v, 0.0, h, opt.r_max);
    std::vector<cplx> sums(kappas.size());
    parallel_for(kappas.size(), opt.threads, [&](std::size_t i) {
        sums[i] = 2.0 * std::abs(kappas[i]) * spectral_sum(s, kappas[i], hbar, tf, opt.points_per_wavelength);
    });
    return assemble_trace(kappas, std::move(sums), opt.remainder_tol);
}

TraceValue trace_difference(const ScalarPotential& v1, const ScalarPotential& v2, double hbar,
                            const TestFunctionSpec& tf, int kappa_max, const TraceOptions& opt) {
    tf.validate();
    const auto kappas = channel_order(kappa_max);
    const double h = trace_step(hbar, opt);
    const auto s1 = sample_channel_potential(v1, 0.0, h, opt.r_max);
    const auto s2 = sample_channel_potential(v2, 0.0, h, opt.r_max);
    std::vector<cplx> sums(kappas.size());
    parallel_for(kappas.size(), opt.threads, [&](std::size_t i) {
        const double ppw = opt.points_per_wavelength;
        sums[i] = 2.0 * std::abs(kappas[i]) *
                  (spectral_sum(s2, kappas[i], hbar, tf, ppw) - spectral_sum(s1, kappas[i], hbar, tf, ppw));
    });
    return assemble_trace(kappas, std::move(sums), opt.remainder_tol);
}

json PhaseSpaceTrace::to_json() const {
    return {{"value", cjson(value)}, {"value_level_set", cjson(value_level_set)}, {"consistency", consistency}};
}

PhaseSpaceTrace phase_space_trace(const ScalarPotential& v1, const ScalarPotential& v2, double hbar,
                                  const TestFunctionSpec& tf) {
    tf.validate();
    if (!(hbar > 0.0)) throw ConfigError("hbar must be positive");
    const double lo = tf.chi.support_lo(), hi = tf.chi.support_hi();
    const int s_lo = branch_sign(v1, v2, lo);
    const int s_hi = branch_sign(v1, v2, hi);
    if (s_lo != s_hi) throw DomainError("test function support crosses the forbidden band");

    std::vector<double> pts{lo, tf.chi.a, tf.chi.b, hi};
    for (const auto& v : {v1, v2})
        for (double t : {1.0 + v.sup_v(), 1.0 + v.inf_v(), -1.0 + v.sup_v(), -1.0 + v.inf_v()})
            if (t > lo && t < hi) pts.push_back(t);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end(), [](double a, double b) { return std::abs(a - b) < 1e-12; }),
              pts.end());

    const bool complex_f = tf.kind == TestFunctionSpec::Kind::gaussian;
    auto both = [&](const std::function<cplx(double)>& g) {
        const double re = integrate_panels([&](double E) { return g(E).real(); }, pts, 1e-8).value;
        const double im = complex_f ? integrate_panels([&](double E) { return g(E).imag(); }, pts, 1e-8).value : 0.0;
        return cplx(re, im);
    };
    const double scale = kWeylConstant / (hbar * hbar * hbar);
    PhaseSpaceTrace out;
    out.value = scale * both([&](double E) {
        const cplx cf = tf.chi_f(E);
        return cf == 0.0 ? cplx(0.0) : cf * omega_direct_at(v1, v2, E);
    });
    out.value_level_set = -scale * both([&](double E) {
        const cplx d = tf.chi_f_derivative(E);
        return d == 0.0 ? cplx(0.0) : d * rho_via_level_sets(v1, v2, E);
    });
    const double den = std::max(std::abs(out.value), std::abs(out.value_level_set));
    out.consistency = den > 0.0 ? std::abs(out.value - out.value_level_set) / den : 0.0;
    return out;
}

json ResidualTable::to_json() const {
    auto num = [](double x) -> json { return std::isfinite(x) ? json(x) : json(nullptr); };
    json rs = json::array();
    for (const auto& r : rows)
        rs.push_back({{"hbar", r.hbar},
                      {"kappa_max", r.kappa_max},
                      {"operator_side", r.operator_side},
                      {"phase_space", r.phase_space},
                      {"residual", r.residual},
                      {"relative", r.relative},
                      {"remainder", r.remainder},
                      {"converged", r.converged}});
    return {{"rows", rs},
            {"residual_order", num(residual_order)},
            {"operator_slope", num(operator_slope)},
            {"phase_space_slope", num(phase_space_slope)},
            {"fitted_constant", num(fitted_constant)},
            {"max_scaled_ratio", num(max_scaled_ratio)}};
}

std::string ResidualTable::to_csv() const {
    std::ostringstream os;
    os.precision(17);
    os << "hbar,kappa_max,operator_side,phase_space,residual,relative,remainder,converged\n";
    for (const auto& r : rows)
        os << r.hbar << ',' << r.kappa_max << ',' << r.operator_side << ',' << r.phase_space << ',' << r.residual << ','
           << r.relative << ',' << r.remainder << ',' << (r.converged ? 1 : 0) << '\n';
    return os.str();
}

ResidualTable bruneau_robert_residual(const ScalarPotential& v1, const ScalarPotential& v2,
                                      const std::vector<double>& hbar_list, const TestFunctionSpec& tf,
                                      double kappa_c, const TraceOptions& opt) {
    if (hbar_list.size() < 3) throw ConfigError("residual scaling needs at least three hbar values");
    const double base = phase_space_trace(v1, v2, 1.0, tf).value.real();
    ResidualTable t;
    std::vector<double> x, lr, lo, lp;
    double ratio_sum = 0.0;
    for (double hb : hbar_list) {
        ResidualRow r;
        r.hbar = hb;
        r.kappa_max = kappa_max_rule(kappa_c, hb);
        const auto tr = trace_difference(v1, v2, hb, tf, r.kappa_max, opt);
        r.operator_side = tr.value.real();
        r.phase_space = base / (hb * hb * hb);
        r.residual = r.operator_side - r.phase_space;
        r.relative = r.phase_space != 0.0 ? std::abs(r.residual) / std::abs(r.phase_space) : 0.0;
        r.remainder = std::abs(tr.remainder);
        r.converged = tr.converged;
        t.rows.push_back(r);
        x.push_back(std::log(1.0 / hb));
        lr.push_back(std::log(std::abs(r.residual)));
        lo.push_back(std::log(std::abs(r.operator_side)));
        lp.push_back(std::log(std::abs(r.phase_space)));
        if (r.phase_space != 0.0) ratio_sum += r.operator_side / r.phase_space;
    }
    const double nan = std::numeric_limits<double>::quiet_NaN();
    auto slope = [&](const std::vector<double>& y) {
        for (double v : y)
            if (!std::isfinite(v)) return nan;
        return fit_line(x, y).slope;
    };
    t.residual_order = slope(lr);
    t.operator_slope = slope(lo);
    t.phase_space_slope = slope(lp);
    t.fitted_constant = base != 0.0 ? ratio_sum / static_cast<double>(t.rows.size()) : nan;
    double smin = std::numeric_limits<double>::infinity(), smax = 0.0;
    for (const auto& r : t.rows) {
        const double s = std::abs(r.residual) * r.hbar * r.hbar;
        smin = std::min(smin, s);
        smax = std::max(smax, s);
    }
    t.max_scaled_ratio = smin > 0.0 ? smax / smin : nan;
    return t;
}

ComplexRect ComplexWindow::omega() const { return {E0 + 1.0 - 2.0 * b, E0 + 1.0 + 2.0 * b, -2.0 * a, a}; }
ComplexRect ComplexWindow::inner() const { return {E0 + 1.0 - b, E0 + 1.0 + b, -a, a}; }

bool ComplexWindow::in_omega(cplx z) const {
    const auto o = omega();
    return z.real() > o.re_lo && z.real() < o.re_hi && z.imag() > o.im_lo && z.imag() <= o.im_hi;
}

bool ComplexWindow::in_inner(cplx z) const {
    const auto w = inner();
    return z.real() >= w.re_lo && z.real() <= w.re_hi && z.imag() > w.im_lo && z.imag() <= w.im_hi;
}

void ComplexWindow::validate() const {
    if (!(a > 0.0) || !(b > 0.0)) throw ConfigError("window constants a and b must be positive");
}

std::vector<std::string> ComplexWindow::warnings() const {
    std::vector<std::string> w;
    if (a / b > 0.5) w.push_back("a/b is not small");
    if (a >= 0.5 * b * b) w.push_back("a >= b^2/2: the probe is not suppressed on the upper part of Omega \\ W");
    return w;
}

json SuppressionReport::to_json() const {
    return {{"c0_lower", c0_lower}, {"c0_full", c0_full}, {"c0_lateral", c0_lateral}, {"pass", pass}, {"warnings", warnings}};
}

SuppressionReport suppression_check(const ComplexWindow& window, const GaussianProbe& probe, std::size_t mesh) {
    window.validate();
    if (mesh < 8) throw ConfigError("suppression mesh too coarse");
    const auto o = window.omega();
    const double inf = std::numeric_limits<double>::infinity();
    SuppressionReport r{inf, inf, inf, false, window.warnings()};
    auto g = [&](cplx z) {
        const cplx d = probe.alpha - z;
        return -(cplx(0.0, probe.beta) * d - 0.5 * d * d).real();
    };
    const std::size_t ny = mesh / 2;
    for (std::size_t i = 0; i <= mesh; ++i) {
        const double x = o.re_lo + (o.re_hi - o.re_lo) * static_cast<double>(i) / static_cast<double>(mesh);
        for (std::size_t j = 0; j <= ny; ++j) {
            const double y = o.im_lo + (o.im_hi - o.im_lo) * static_cast<double>(j) / static_cast<double>(ny);
            const cplx z(x, y);
            if (window.in_inner(z)) continue;
            const double val = g(z);
            r.c0_full = std::min(r.c0_full, val);
            if (y <= 0.0) r.c0_lower = std::min(r.c0_lower, val);
            if (i == 0 || i == mesh) r.c0_lateral = std::min(r.c0_lateral, val);
        }
    }
    r.pass = r.c0_lower > 0.0;
    return r;
}

json LocalTraceReport::to_json() const {
    return {{"resonance_sum", cjson(resonance_sum)},
            {"phase_space", cjson(phase_space)},
            {"ratio", ratio},
            {"bound_epsilon", bound_epsilon},
            {"bound", bound},
            {"bound_holds", bound_holds},
            {"consistent", consistent},
            {"resonances_v1", resonances_v1},
            {"resonances_v2", resonances_v2},
            {"note", note}};
}

LocalTraceReport local_trace_experiment(double hbar, const ComplexWindow& window, const GaussianProbe& probe,
                                        const PlateauCutoff& chi, const EnergyDistribution& omega,
                                        const ResonanceSet& res_v2, const ResonanceSet& res_v1, double epsilon,
                                        double multiplicity_scale) {
    window.validate();
    if (!(hbar > 0.0)) throw ConfigError("hbar must be positive");
    if (!(probe.lambda > 0.0) || probe.lambda > 500.0) throw ConfigError("probe lambda must lie in (0, 500]");
    if (omega.kind != SampleKind::density) throw ConfigError("omega must hold density samples");
    LocalTraceReport r;
    auto add = [&](const ResonanceSet& set, double sign, std::size_t& n) {
        for (const auto& e : set.entries) {
            if (!e.certified || !window.in_inner(e.z)) continue;
            r.resonance_sum += sign * multiplicity_scale * e.multiplicity * probe(e.z);
            ++n;
        }
    };
    add(res_v2, 1.0, r.resonances_v2);
    add(res_v1, -1.0, r.resonances_v1);

    const double scale = kWeylConstant / (hbar * hbar * hbar);
    cplx acc = 0.0;
    for (std::size_t k = 0; k < omega.size(); ++k) {
        const double E = omega.grid[k];
        const double c = chi(E);
        if (c == 0.0) continue;
        const double w = (k == 0 || k + 1 == omega.size()) ? 0.5 : 1.0;
        const double dE = k + 1 < omega.size() ? omega.grid[k + 1] - E : E - omega.grid[k - 1];
        acc += w * dE * c * omega.values[k] * probe(E);
    }
    r.phase_space = scale * acc;
    const double ps = std::abs(r.phase_space);
    r.ratio = ps > 0.0 ? std::abs(r.resonance_sum) / ps : 0.0;
    r.bound_epsilon = epsilon;
    r.bound = 0.5 * scale * std::exp(-epsilon * probe.lambda);
    r.bound_holds = std::abs(r.resonance_sum) >= r.bound;
    if (r.resonances_v1 + r.resonances_v2 == 0 && ps > 0.0) {
        r.consistent = false;
        r.note = "no resonances in W while the phase-space side is nonzero";
    }
    return r;
}

}  // namespace reslab
