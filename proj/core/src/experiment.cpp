#include "reslab/experiment.hpp"

#include "reslab/bessel.hpp"
#include "reslab/dirac.hpp"
#include "reslab/errors.hpp"
#include "reslab/fbi.hpp"
#include "reslab/io.hpp"
#include "reslab/phasespace.hpp"
#include "reslab/symbols.hpp"
#include "reslab/traces.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace reslab {

using nlohmann::json;
namespace fs = std::filesystem;

const std::vector<std::string>& experiment_kinds() {
    static const std::vector<std::string> kinds{"phasespace", "symbol", "fbi", "resonances", "trace", "lower-bound"};
    return kinds;
}

namespace {

// Keys that may change between runs without changing the results.
const std::vector<std::string> kVolatileKeys{"threads", "output_dir"};

const json& section(const json& doc, const char* key) {
    static const json empty = json::object();
    if (!doc.contains(key)) return empty;
    if (!doc.at(key).is_object()) throw ConfigError(std::string("'") + key + "' must be an object");
    return doc.at(key);
}

double number(const json& j, const char* key, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_number()) throw ConfigError(std::string("'") + key + "' must be a number");
    return j.at(key).get<double>();
}

std::vector<double> number_list(const json& j, const char* key, std::vector<double> fallback) {
    if (!j.contains(key)) return fallback;
    const auto& a = j.at(key);
    if (!a.is_array() || a.empty()) throw ConfigError(std::string("'") + key + "' must be a non-empty array");
    std::vector<double> out;
    for (const auto& x : a) {
        if (!x.is_number()) throw ConfigError(std::string("'") + key + "' must hold numbers");
        out.push_back(x.get<double>());
    }
    return out;
}

cplx complex_of(const json& j) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return {j[0].get<double>(), j[1].get<double>()};
    throw ConfigError("complex numbers are written as [re, im]");
}

// {"lo", "hi", "step"}: lo + k step for k = 0..round((hi - lo) / step).
std::vector<double> uniform_grid(const json& j, double lo, double hi, double step) {
    lo = number(j, "lo", lo);
    hi = number(j, "hi", hi);
    step = number(j, "step", step);
    if (!(step > 0.0) || !(hi > lo)) throw ConfigError("grid needs lo < hi and step > 0");
    const auto n = static_cast<std::size_t>(std::llround((hi - lo) / step)) + 1;
    if (n > 2000000) throw ConfigError("grid too large");
    std::vector<double> g(n);
    for (std::size_t k = 0; k < n; ++k) g[k] = lo + static_cast<double>(k) * step;
    return g;
}

ComplexRect rect_of(const json& j, ComplexRect fallback) {
    fallback.re_lo = number(j, "re_lo", fallback.re_lo);
    fallback.re_hi = number(j, "re_hi", fallback.re_hi);
    fallback.im_lo = number(j, "im_lo", fallback.im_lo);
    fallback.im_hi = number(j, "im_hi", fallback.im_hi);
    if (!(fallback.re_hi > fallback.re_lo) || !(fallback.im_hi > fallback.im_lo))
        throw ConfigError("window needs re_lo < re_hi and im_lo < im_hi");
    return fallback;
}

std::array<cplx, 2> theta_pair_of(const json& doc, std::array<cplx, 2> fallback) {
    if (!doc.contains("theta_pair")) return fallback;
    const auto& t = doc.at("theta_pair");
    if (!t.is_array() || t.size() != 2) throw ConfigError("'theta_pair' needs two entries");
    return {complex_of(t[0]), complex_of(t[1])};
}

PlateauCutoff cutoff_of(const json& j, PlateauCutoff fallback) {
    fallback.a = number(j, "a", fallback.a);
    fallback.b = number(j, "b", fallback.b);
    fallback.w = number(j, "w", fallback.w);
    if (!(fallback.b > fallback.a) || !(fallback.w > 0.0)) throw ConfigError("cutoff needs a < b and w > 0");
    return fallback;
}

ResonanceOptions resonance_options(const json& doc, unsigned threads) {
    ResonanceOptions o;
    const auto& g = section(doc, "grid");
    o.grid.h = number(g, "h", o.grid.h);
    o.grid.r_max = number(g, "r_max", o.grid.r_max);
    o.grid.points_per_wavelength = number(g, "points_per_wavelength", o.grid.points_per_wavelength);
    o.grid.absorb_decades = number(g, "absorb_decades", o.grid.absorb_decades);
    o.grid.r_max_cap = number(g, "r_max_cap", o.grid.r_max_cap);
    o.stability_gap = number(doc, "stability_gap", o.stability_gap);
    o.curve_margin = number(doc, "curve_margin", o.curve_margin);
    o.certify = doc.value("certify", o.certify);
    o.threads = threads;
    return o;
}

struct PotentialPair {
    ScalarPotential v1, v2;
};

ScalarPotential load_potential(const json& decl, const fs::path& base) { return potential_from_json(decl, base); }

// Mollified models evaluate by quadrature; real-axis pipelines use a monotone table of them.
ScalarPotential for_real_axis(const ScalarPotential& v) { return v.kind() == "mollified" ? tabulate(v) : v; }

PotentialPair load_pair(const ExperimentConfig& cfg) {
    const auto& p = section(cfg.raw, "potentials");
    if (!p.contains("v1") || !p.contains("v2")) throw ConfigError("'potentials' needs 'v1' and 'v2'");
    return {load_potential(p.at("v1"), cfg.base_dir), load_potential(p.at("v2"), cfg.base_dir)};
}

std::string csv(const std::vector<std::string>& header, const std::vector<std::vector<double>>& columns) {
    CsvTable t;
    t.header = header;
    const std::size_t n = columns.empty() ? 0 : columns.front().size();
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> row;
        for (const auto& c : columns) row.push_back(c[i]);
        t.rows.push_back(std::move(row));
    }
    return t.str();
}

json finite_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

using Artifacts = std::map<std::string, std::string>;

Artifacts run_phasespace(const ExperimentConfig& cfg) {
    const auto pair = load_pair(cfg);
    const auto v1 = for_real_axis(pair.v1), v2 = for_real_axis(pair.v2);
    const auto& doc = cfg.raw;
    const auto mu_grid = uniform_grid(section(doc, "mu_grid"), 1e-3, 0.6, 1e-3);
    const auto e_grid = uniform_grid(section(doc, "omega_grid"), 1.05, 1.6, 1e-3);
    const auto nm = build_nu_mu(v1, v2, mu_grid, cfg.seed, cfg.threads);
    const auto om = omega(v1, v2, e_grid, cfg.threads);
    const int sign = branch_sign(v1, v2, e_grid.front());
    const auto conv = convolution_check(nm.nu, om.direct, sign);

    Artifacts out;
    out["distributions.csv"] =
        csv({"E_rest_mass", "nu_plus_1", "nu_plus_2", "nu_minus_1", "nu_minus_2", "nu", "mu"},
            {mu_grid, nm.nu_plus_1.values, nm.nu_plus_2.values, nm.nu_minus_1.values, nm.nu_minus_2.values,
             nm.nu.values, nm.mu.values});
    out["omega.csv"] = csv({"E_rest_mass", "omega_direct", "omega_fd", "phi_conv_mu"},
                           {e_grid, om.direct.values, om.finite_difference.values, conv.phi_mu});
    json summary = {{"convolution", conv.to_json()},
                    {"omega_fd_deviation", om.max_deviation},
                    {"mu", nm.mu.sidecar()},
                    {"nu", nm.nu.sidecar()},
                    {"omega", om.direct.sidecar()},
                    {"mu_order_constant", mu_order_constant(v1, v2)},
                    {"sign", sign}};
    summary["convolution"].erase("phi_mu");
    out["summary.json"] = dump_json(summary);
    return out;
}

Artifacts run_symbol(const ExperimentConfig& cfg) {
    const auto& doc = cfg.raw;
    const int sign = static_cast<int>(number(doc, "sign", 1.0));
    if (sign != 1 && sign != -1) throw ConfigError("'sign' must be +1 or -1");
    const auto& xs = section(doc, "xi");
    const double lo = number(xs, "lo", 20.0), hi = number(xs, "hi", 2000.0);
    const double n = number(xs, "n", 50.0);
    if (!(lo > 0.0) || !(hi > lo) || n < 3) throw ConfigError("'xi' needs 0 < lo < hi and n >= 3");
    const auto cert = decay_and_ellipticity(sign, logspace(lo, hi, static_cast<std::size_t>(n)));

    json pairing = json::array();
    for (double x0 : number_list(doc, "pairing_xi0", {10.0, 15.0, 25.0})) {
        const auto p = pairing_oracle(sign, x0);
        pairing.push_back({{"xi0", x0}, {"relative_difference", p.relative_difference}});
    }
    double rec = 0.0;
    for (double r : {0.5, 2.0, 8.0, 12.0, 30.0})
        for (double a : {0.0, 0.5, 1.0, 1.5})
            rec = std::max(rec, BesselEvaluator::recurrence_residual(std::polar(r, a)));

    json c = cert.to_json();
    c["pairing"] = pairing;
    c["recurrence_residual_max"] = rec;
    Artifacts out;
    out["symbol.csv"] = csv({"xi", "abs_symbol", "fit_residual"}, {cert.xi, cert.abs_a, cert.residuals});
    out["certificate.json"] = dump_json(c);
    return out;
}

UniformSamples fbi_signal(const ExperimentConfig& cfg, const json& sig) {
    const std::string kind = sig.value("kind", "mu");
    const double step = number(sig, "step", 1e-3);
    if (kind == "gaussian") return UniformSamples::sample([](double y) { return std::exp(-0.5 * y * y); }, -6, 6, step);
    if (kind == "heaviside") return UniformSamples::sample([](double y) { return y > 0.0 ? 1.0 : (y == 0.0 ? 0.5 : 0.0); }, -6, 6, step);
    if (kind == "mu" || kind == "shifted_mu" || kind == "elliptic_mu") {
        const auto pair = load_pair(cfg);
        const auto v1 = for_real_axis(pair.v1), v2 = for_real_axis(pair.v2);
        const auto grid = uniform_grid(section(sig, "grid"), step, 1.0, step);
        auto mu = build_nu_mu(v1, v2, grid, cfg.seed, cfg.threads).mu;
        if (kind == "mu") return UniformSamples::from(mu);
        mu = mu.shifted(1.0);
        if (kind == "shifted_mu") return UniformSamples::from(mu);
        const auto E = uniform_grid(section(sig, "output_grid"), 1.0 + step, 2.0, step);
        EnergyDistribution a = mu;
        a.grid = E;
        a.values = convolve(kernel_phi_tilde_plus(), to_cumulative(mu), E);
        return UniformSamples::from(a);
    }
    throw ConfigError("unknown fbi signal kind: " + kind);
}

Artifacts run_fbi(const ExperimentConfig& cfg) {
    const auto& doc = cfg.raw;
    const auto& sc = section(doc, "scan");
    const auto x_grid = uniform_grid(sc, 0.05, 0.7, 0.01);
    const double xi0 = number(sc, "xi0", 1.0);
    const auto& lam = section(doc, "lambda");
    const auto lambdas = logspace(number(lam, "lo", 50.0), number(lam, "hi", 500.0),
                                  static_cast<std::size_t>(number(lam, "n", 12.0)));
    const auto& cut = section(doc, "cutoff");
    FbiCutoff chi;
    chi.radius = number(cut, "radius", chi.radius);
    chi.edge = number(cut, "edge", chi.edge);
    ClassifierOptions copt;
    copt.rate_floor = number(doc, "rate_floor", copt.rate_floor);

    const auto u = fbi_signal(cfg, section(doc, "signal"));
    const auto scan = singular_support_scan(u, x_grid, xi0, lambdas, chi, copt, cfg.threads);
    Artifacts out;
    out["scan.json"] = dump_json(scan.to_json());
    out["heatmap.csv"] = scan.heatmap_csv();
    if (doc.contains("compare_signal")) {
        const auto u2 = fbi_signal(cfg, section(doc, "compare_signal"));
        const auto& cs = section(doc, "compare_scan");
        const auto x2 = cs.empty() ? x_grid : uniform_grid(cs, x_grid.front(), x_grid.back(), x_grid[1] - x_grid[0]);
        const auto scan2 = singular_support_scan(u2, x2, xi0, lambdas, chi, copt, cfg.threads);
        const double cell = x_grid[1] - x_grid[0];
        const double d = hausdorff_cells(scan.flagged, scan2.flagged, cell);
        json inv = {{"flagged_a", scan.flagged},
                    {"flagged_b", scan2.flagged},
                    {"hausdorff_cells", finite_or_null(d)},
                    {"agree", d <= 1.0}};
        out["invariance.json"] = dump_json(inv);
    }
    return out;
}

std::string curve_csv(const std::array<cplx, 2>& thetas) {
    const auto lam = linspace(0.0, 4.0, 201);
    std::vector<std::vector<double>> cols(6);
    for (int t = 0; t < 2; ++t) {
        for (const auto& p : essential_curve(thetas[t], lam)) {
            cols[0].push_back(t);
            cols[1].push_back(p.lambda);
            cols[2].push_back(p.plus.real());
            cols[3].push_back(p.plus.imag());
            cols[4].push_back(p.minus.real());
            cols[5].push_back(p.minus.imag());
        }
    }
    return csv({"theta_index", "lambda", "plus_re", "plus_im", "minus_re", "minus_im"}, cols);
}

ScalarPotential resonance_potential(const ExperimentConfig& cfg) {
    if (cfg.raw.contains("potential")) return load_potential(cfg.raw.at("potential"), cfg.base_dir);
    return load_pair(cfg).v2;
}

int kappa_max_of(const json& doc, double hbar, double c_default) {
    if (doc.contains("kappa_max")) {
        const double k = number(doc, "kappa_max", 0.0);
        if (k < 1) throw ConfigError("'kappa_max' must be at least 1");
        return static_cast<int>(k);
    }
    return kappa_max_rule(number(doc, "kappa_c", c_default), hbar);
}

Artifacts run_resonances(const ExperimentConfig& cfg) {
    const auto& doc = cfg.raw;
    const auto v = resonance_potential(cfg);
    const double hbar = number(doc, "hbar", 0.1);
    const auto thetas = theta_pair_of(doc, {cplx(0.0, 0.5), cplx(0.0, 0.55)});
    const auto window = rect_of(section(doc, "window"), {1.35, 1.6, -0.2, 0.0});
    const int km = kappa_max_of(doc, hbar, 3.0);
    const auto set = resonances(v, hbar, thetas[0], thetas[1], window, km, resonance_options(doc, cfg.threads));
    Artifacts out;
    out["resonances.json"] = dump_json(set.to_json());
    out["resonances.csv"] = set.to_csv();
    out["curve.csv"] = curve_csv(thetas);
    return out;
}

TestFunctionSpec test_function_of(const json& doc) {
    const auto chi = cutoff_of(section(doc, "chi"), {1.2, 1.7, 0.1});
    const auto& f = section(doc, "f");
    const std::string kind = f.value("kind", "polynomial");
    if (kind == "polynomial") return TestFunctionSpec::polynomial(chi, number_list(f, "coefficients", {1.0}));
    if (kind == "gaussian") {
        GaussianProbe p;
        p.alpha = number(f, "alpha", p.alpha);
        p.beta = number(f, "beta", p.beta);
        p.lambda = number(f, "lambda", p.lambda);
        return TestFunctionSpec::gaussian(chi, p);
    }
    throw ConfigError("unknown test function kind: " + kind);
}

std::vector<double> hbar_list_of(const json& doc) {
    auto h = number_list(doc, "hbar_list", {0.2, 0.1, 0.05});
    for (std::size_t i = 0; i < h.size(); ++i) {
        if (!(h[i] > 0.0)) throw ConfigError("'hbar_list' entries must be positive");
        if (i > 0 && !(h[i] < h[i - 1])) throw ConfigError("'hbar_list' must be decreasing");
    }
    return h;
}

Artifacts run_trace(const ExperimentConfig& cfg) {
    const auto& doc = cfg.raw;
    const auto pair = load_pair(cfg);
    const auto v1 = for_real_axis(pair.v1), v2 = for_real_axis(pair.v2);
    const auto tf = test_function_of(doc);
    TraceOptions o;
    o.r_max = number(doc, "r_max", o.r_max);
    o.points_per_wavelength = number(doc, "points_per_wavelength", o.points_per_wavelength);
    o.remainder_tol = number(doc, "remainder_tol", o.remainder_tol);
    o.threads = cfg.threads;
    const auto table = bruneau_robert_residual(v1, v2, hbar_list_of(doc), tf, number(doc, "kappa_c", 4.0), o);
    json t = table.to_json();
    t["test_function"] = tf.to_json();
    Artifacts out;
    out["residuals.csv"] = table.to_csv();
    out["trace.json"] = dump_json(t);
    return out;
}

Artifacts run_lower_bound(const ExperimentConfig& cfg) {
    const auto& doc = cfg.raw;
    const auto pair = load_pair(cfg);
    const auto v1 = for_real_axis(pair.v1), v2 = for_real_axis(pair.v2);
    const auto hbars = hbar_list_of(doc);
    const auto thetas = theta_pair_of(doc, {cplx(0.0, 0.6), cplx(0.0, 0.65)});
    const auto window = rect_of(section(doc, "window"), {1.35, 1.6, -0.4, 0.0});
    const auto ropt = resonance_options(doc, cfg.threads);
    const double kc = number(doc, "kappa_c", 3.0);

    // The mollified v1 is kept off the dilated eigenproblems; its resonance set is that of D0.
    std::vector<std::string> notes;
    ScalarPotential v1_dilated = pair.v1;
    if (pair.v1.kind() == "mollified") {
        v1_dilated = ScalarPotential::zero();
        notes.push_back("v1 is mollified; its complex-dilated spectra use v1 = 0 (sup|v1| below the mollification level)");
    }

    const auto table = count_scaling(pair.v2, hbars, window, thetas[0], thetas[1], kc, ropt);
    Artifacts out;
    json scaling = table.to_json();
    scaling["window"] = window.to_json();
    scaling["theta_pair"] = {{thetas[0].real(), thetas[0].imag()}, {thetas[1].real(), thetas[1].imag()}};
    scaling["kappa_c"] = kc;
    scaling["notes"] = notes;
    out["counts.csv"] = table.to_csv();
    for (std::size_t i = 0; i < table.sets.size(); ++i) {
        std::ostringstream name;
        name << "resonances_hbar_" << i << ".csv";
        out[name.str()] = table.sets[i].to_csv();
    }
    out["scaling.json"] = dump_json(scaling);

    const auto& lb = section(doc, "local_trace");
    ComplexWindow cw;
    cw.E0 = number(lb, "E0", cw.E0);
    cw.a = number(lb, "a", cw.a);
    cw.b = number(lb, "b", cw.b);
    GaussianProbe probe;
    probe.alpha = number(lb, "alpha", cw.E0 + 1.0);
    probe.beta = number(lb, "beta", probe.beta);
    probe.lambda = number(lb, "lambda", probe.lambda);
    out["suppression.json"] = dump_json(suppression_check(cw, probe).to_json());

    const auto om_grid = uniform_grid(section(doc, "omega_grid"), 1.05, 1.95, 1e-3);
    EnergyDistribution om = omega(v1, v2, om_grid, cfg.threads).direct;
    WitnessOptions wopt;
    wopt.lambda_seq = number_list(section(doc, "witness"), "lambda_seq", logspace(50.0, 400.0, 10));
    wopt.eps_target = number(section(doc, "witness"), "eps_target", wopt.eps_target);
    const auto wit = probe_sequence_witness(om, cw.E0 + 1.0, wopt);
    out["witness.json"] = dump_json(wit.to_json());

    if (number(lb, "enabled", 1.0) != 0.0) {
        const double hb = number(lb, "hbar", hbars.front());
        const auto inner = cw.inner();
        const ComplexRect lower{inner.re_lo, inner.re_hi, inner.im_lo, 0.0};
        const int km = kappa_max_rule(kc, hb);
        const auto r2 = resonances(pair.v2, hb, thetas[0], thetas[1], lower, km, ropt);
        const auto r1 = resonances(v1_dilated, hb, thetas[0], thetas[1], lower, km, ropt);
        const double eps = wit.rows.empty() ? number(lb, "epsilon", 0.05) : wit.rows.back().epsilon;
        const auto chi = cutoff_of(section(lb, "chi"), {cw.E0 + 1.0 - 2.0 * cw.b, cw.E0 + 1.0 + 2.0 * cw.b, 0.05});
        auto rep = local_trace_experiment(hb, cw, probe, chi, om, r2, r1, std::isfinite(eps) ? eps : 0.05);
        json j = rep.to_json();
        j["hbar"] = hb;
        j["kappa_max"] = km;
        j["partial"] = r1.partial() || r2.partial();
        j["notes"] = notes;
        out["local_trace.json"] = dump_json(j);
    }
    return out;
}

json strip_volatile(json doc) {
    for (const auto& k : kVolatileKeys) doc.erase(k);
    return doc;
}

}  // namespace

ExperimentConfig parse_config(const json& doc, const fs::path& base_dir, const ConfigOverrides& ov) {
    if (!doc.is_object()) throw ConfigError("config must be a JSON object");
    if (!doc.contains("schema_version") || !doc.at("schema_version").is_number_integer())
        throw ConfigError("config needs an integer 'schema_version'");
    const int sv = doc.at("schema_version").get<int>();
    if (sv != kSchemaVersion)
        throw ConfigError("unsupported schema_version " + std::to_string(sv) + " (expected " +
                          std::to_string(kSchemaVersion) + ")");
    ExperimentConfig cfg;
    cfg.raw = doc;
    cfg.base_dir = base_dir;
    if (!doc.contains("kind") || !doc.at("kind").is_string()) throw ConfigError("config needs a string 'kind'");
    cfg.kind = doc.at("kind").get<std::string>();
    if (ov.kind && *ov.kind != cfg.kind)
        throw ConfigError("subcommand '" + *ov.kind + "' does not match config kind '" + cfg.kind + "'");
    const auto& kinds = experiment_kinds();
    if (std::find(kinds.begin(), kinds.end(), cfg.kind) == kinds.end())
        throw ConfigError("unknown experiment kind: " + cfg.kind);

    if (ov.seed) {
        cfg.raw["seed"] = *ov.seed;
    } else if (!doc.contains("seed")) {
        throw ConfigError("config needs an explicit 'seed'");
    }
    if (!cfg.raw.at("seed").is_number_integer() || cfg.raw.at("seed").get<long long>() < 0) throw ConfigError("'seed' must be a non-negative integer");
    cfg.seed = cfg.raw.at("seed").get<std::uint64_t>();

    if (ov.threads) {
        cfg.threads = *ov.threads;
    } else if (doc.contains("threads")) {
        if (!doc.at("threads").is_number_integer() || doc.at("threads").get<long long>() < 1)
            throw ConfigError("'threads' must be a positive integer");
        cfg.threads = doc.at("threads").get<unsigned>();
    }
    if (cfg.threads == 0) throw ConfigError("'threads' must be a positive integer");

    if (ov.output_dir) {
        cfg.output_dir = *ov.output_dir;
    } else if (doc.contains("output_dir") && doc.at("output_dir").is_string()) {
        cfg.output_dir = (base_dir / doc.at("output_dir").get<std::string>()).lexically_normal();
    } else {
        throw ConfigError("no output directory: set 'output_dir' or pass --out");
    }

    // Load every declared potential now so missing tables fail before any output exists.
    const auto& p = section(doc, "potentials");
    for (const auto& [name, decl] : p.items()) potential_from_json(decl, base_dir);
    if (doc.contains("potential")) potential_from_json(doc.at("potential"), base_dir);

    cfg.text = dump_json(strip_volatile(cfg.raw));
    return cfg;
}

ExperimentConfig load_config(const fs::path& path, const ConfigOverrides& ov) {
    if (!fs::exists(path)) throw ConfigError("config file not found: " + path.string());
    json doc;
    try {
        doc = json::parse(read_file(path));
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    return parse_config(doc, path.parent_path(), ov);
}

std::map<std::string, std::string> compute_artifacts(const ExperimentConfig& cfg) {
    try {
        if (cfg.kind == "phasespace") return run_phasespace(cfg);
        if (cfg.kind == "symbol") return run_symbol(cfg);
        if (cfg.kind == "fbi") return run_fbi(cfg);
        if (cfg.kind == "resonances") return run_resonances(cfg);
        if (cfg.kind == "trace") return run_trace(cfg);
        if (cfg.kind == "lower-bound") return run_lower_bound(cfg);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("invalid config value: ") + e.what());
    }
    throw ConfigError("unknown experiment kind: " + cfg.kind);
}

RunResult run(const ExperimentConfig& cfg) {
    RunResult r;
    std::map<std::string, std::string> artifacts;
    try {
        artifacts = compute_artifacts(cfg);
    } catch (const ConfigError& e) {
        return {2, {}, e.what()};
    } catch (const DomainError& e) {
        return {2, {}, e.what()};
    } catch (const std::exception& e) {
        const bool numerical = dynamic_cast<const NumericalError*>(&e) != nullptr;
        json diag = {{"schema_version", kSchemaVersion},
                     {"kind", cfg.kind},
                     {"error", numerical ? "numerical" : "internal"},
                     {"message", e.what()},
                     {"config_sha256", sha256_hex(cfg.text)}};
        fs::create_directories(cfg.output_dir);
        r.manifest.clear();
        write_file(cfg.output_dir / "diagnostics.json", dump_json(diag));
        return {3, {}, e.what()};
    }
    fs::create_directories(cfg.output_dir);
    write_artifacts(cfg.output_dir, cfg.kind, cfg.text, artifacts);
    r.manifest = cfg.output_dir / "manifest.json";
    r.message = "wrote " + std::to_string(artifacts.size()) + " artifacts";
    return r;
}

RunResult run_config_file(const fs::path& path, const ConfigOverrides& ov) {
    ExperimentConfig cfg;
    try {
        cfg = load_config(path, ov);
    } catch (const ConfigError& e) {
        return {2, {}, e.what()};
    } catch (const DomainError& e) {
        return {2, {}, e.what()};
    }
    return run(cfg);
}

json VerifyReport::to_json() const { return {{"pass", pass}, {"mismatched", mismatched}, {"messages", messages}}; }

namespace {

std::vector<std::string> check_invariants(const std::string& kind, const std::map<std::string, std::string>& files) {
    std::vector<std::string> issues;
    auto table = [&](const std::string& name) -> std::optional<CsvTable> {
        auto it = files.find(name);
        if (it == files.end()) return std::nullopt;
        try {
            return parse_csv(it->second);
        } catch (const std::exception& e) {
            issues.push_back(name + ": unreadable (" + e.what() + ")");
            return std::nullopt;
        }
    };
    auto column = [](const CsvTable& t, const std::string& name) -> int {
        auto it = std::find(t.header.begin(), t.header.end(), name);
        return it == t.header.end() ? -1 : static_cast<int>(it - t.header.begin());
    };
    if (kind == "phasespace") {
        if (auto t = table("distributions.csv")) {
            for (const auto& row : t->rows)
                for (double x : row)
                    if (!std::isfinite(x)) issues.push_back("distributions.csv: non-finite sample");
        }
    } else if (kind == "symbol") {
        if (auto t = table("symbol.csv")) {
            const int c = column(*t, "abs_symbol");
            for (const auto& row : t->rows)
                if (c < 0 || !(row[c] > 0.0)) {
                    issues.push_back("symbol.csv: symbol modulus not positive");
                    break;
                }
        }
    } else if (kind == "resonances" || kind == "lower-bound") {
        for (const auto& [name, bytes] : files) {
            if (name.rfind("resonances", 0) != 0 || name.size() < 4 || name.substr(name.size() - 4) != ".csv") continue;
            auto t = table(name);
            if (!t) continue;
            const int im = column(*t, "z_im"), gap = column(*t, "stability_gap"), cert = column(*t, "certified");
            for (const auto& row : t->rows) {
                if (im >= 0 && row[im] > 0.0) issues.push_back(name + ": resonance above the real axis");
                if (gap >= 0 && cert >= 0 && row[cert] == 1.0 && !(row[gap] <= 1e-4))
                    issues.push_back(name + ": certified entry with stability gap above 1e-4");
            }
        }
        if (auto t = table("counts.csv")) {
            const int c = column(*t, "count");
            for (const auto& row : t->rows)
                if (c < 0 || row[c] < 0.0) issues.push_back("counts.csv: negative count");
        }
    } else if (kind == "trace") {
        if (auto t = table("residuals.csv")) {
            for (const auto& row : t->rows)
                for (double x : row)
                    if (!std::isfinite(x)) issues.push_back("residuals.csv: non-finite entry");
        }
    }
    return issues;
}

}  // namespace

VerifyReport verify(const fs::path& manifest_path) {
    VerifyReport rep;
    if (!fs::exists(manifest_path)) {
        rep.messages.push_back("manifest not found: " + manifest_path.string());
        return rep;
    }
    json doc;
    try {
        doc = json::parse(read_file(manifest_path));
    } catch (const json::exception& e) {
        rep.messages.push_back(std::string("manifest is not valid JSON: ") + e.what());
        return rep;
    }
    const int sv = doc.value("schema_version", 0);
    if (sv != kSchemaVersion) {
        rep.messages.push_back("manifest schema_version " + std::to_string(sv) + " is stale (current " +
                               std::to_string(kSchemaVersion) +
                               "); re-run the experiment with its config to regenerate the artifacts");
        return rep;
    }
    Manifest m;
    try {
        m = Manifest::from_json(doc);
    } catch (const ConfigError& e) {
        rep.messages.push_back(e.what());
        return rep;
    }
    const auto dir = manifest_path.parent_path();
    std::map<std::string, std::string> contents;
    for (const auto& f : m.files) {
        const auto p = dir / f.path;
        if (!fs::exists(p)) {
            rep.mismatched.push_back(f.path);
            rep.messages.push_back(f.path + ": missing");
            continue;
        }
        auto bytes = read_file(p);
        if (sha256_hex(bytes) != f.sha256 || bytes.size() != f.bytes) {
            rep.mismatched.push_back(f.path);
            rep.messages.push_back(f.path + ": content hash mismatch");
            continue;
        }
        contents.emplace(f.path, std::move(bytes));
    }
    for (auto& msg : check_invariants(m.kind, contents)) rep.messages.push_back(std::move(msg));
    rep.pass = rep.mismatched.empty() && rep.messages.empty();
    return rep;
}

}  // namespace reslab
