#include "reslab/fbi.hpp"

#include "reslab/errors.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace reslab {

using nlohmann::json;

UniformSamples UniformSamples::from(const EnergyDistribution& d) {
    UniformSamples u;
    u.step = d.spacing();
    u.origin = d.grid.front();
    u.values = d.values;
    return u;
}

UniformSamples UniformSamples::sample(const std::function<double(double)>& f, double lo, double hi, double step) {
    if (!(hi > lo) || !(step > 0.0)) throw ConfigError("invalid sampling interval");
    UniformSamples u;
    u.origin = lo;
    u.step = step;
    const auto n = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
    u.values.resize(n);
    for (std::size_t k = 0; k < n; ++k) u.values[k] = f(u.x(k));
    return u;
}

double FbiCutoff::operator()(double y) const {
    if (!enabled) return 1.0;
    const double d = std::abs(y - center);
    if (d >= radius) return 0.0;
    if (d <= radius - edge) return 1.0;
    return 1.0 - smoothstep5((d - (radius - edge)) / edge);
}

void check_fbi_resolution(double step, double xi, double lambda) {
    if (!(lambda > 0.0)) throw ConfigError("FBI parameter lambda must be positive");
    if (lambda * step * step > 0.1) {
        std::ostringstream os;
        os << "FBI resolution guard: lambda*h^2 = " << lambda * step * step << " > 0.1";
        throw RefinementRequired(os.str());
    }
    const double hmax = 2.0 * std::numbers::pi / (lambda * std::abs(xi) + 8.0 * std::sqrt(lambda));
    if (step > hmax) {
        std::ostringstream os;
        os << "FBI resolution guard: step " << step << " does not resolve frequency lambda*xi = " << lambda * xi;
        throw RefinementRequired(os.str());
    }
}

FbiValue fbi_transform_detailed(const UniformSamples& u, double x, double xi, double lambda, const FbiCutoff& chi) {
    if (u.values.empty()) throw ConfigError("FBI transform of an empty sample set");
    check_fbi_resolution(u.step, xi, lambda);
    double lo = x - std::sqrt(2.0 * 745.0 / lambda), hi = x + std::sqrt(2.0 * 745.0 / lambda);
    if (chi.enabled) {
        lo = std::max(lo, chi.center - chi.radius);
        hi = std::min(hi, chi.center + chi.radius);
        if (chi.center - chi.radius < u.lo() - 0.5 * u.step || chi.center + chi.radius > u.hi() + 0.5 * u.step)
            throw DomainError("FBI cutoff support is not covered by the samples");
    }
    const double pref = std::pow(2.0, -0.5) * std::pow(lambda / std::numbers::pi, 0.75);
    const long n = static_cast<long>(u.values.size());
    const long k0 = std::max(0L, static_cast<long>(std::floor((lo - u.origin) / u.step)));
    const long k1 = std::min(n - 1, static_cast<long>(std::ceil((hi - u.origin) / u.step)));
    cplx acc = 0.0;
    double mag = 0.0;
    for (long k = k0; k <= k1; ++k) {
        const double y = u.x(static_cast<std::size_t>(k));
        const double c = chi(y);
        const double uy = u.values[static_cast<std::size_t>(k)];
        if (c == 0.0 || uy == 0.0) continue;
        const double w = (k == 0 || k == n - 1) ? 0.5 : 1.0;
        const double d = x - y;
        const double amp = w * c * uy * std::exp(-0.5 * lambda * d * d);
        acc += amp * std::polar(1.0, lambda * d * xi);
        mag += std::abs(amp);
    }
    FbiValue out;
    out.value = pref * u.step * acc;
    out.rounding_bound = pref * u.step * mag * std::numeric_limits<double>::epsilon();
    return out;
}

cplx fbi_transform(const UniformSamples& u, double x, double xi, double lambda, const FbiCutoff& chi) {
    return fbi_transform_detailed(u, x, xi, lambda, chi).value;
}

void FBIProbe::validate() const {
    if (lambda_seq.size() < 10) throw ConfigError("FBI probe needs at least 10 lambda values");
    for (std::size_t i = 1; i < lambda_seq.size(); ++i)
        if (!(lambda_seq[i] > lambda_seq[i - 1])) throw ConfigError("lambda sequence must be strictly increasing");
    if (!(lambda_seq.front() > 0.0) || lambda_seq.back() < 10.0 * lambda_seq.front())
        throw ConfigError("lambda sequence must be positive and span a decade");
    if (cutoff.enabled && (cutoff.radius <= 0.0 || cutoff.edge <= 0.0 || cutoff.edge >= cutoff.radius))
        throw ConfigError("invalid FBI cutoff");
}

std::vector<double> default_lambda_sequence() { return logspace(50.0, 500.0, 12); }

std::string to_string(Decay d) { return d == Decay::exponential_decay ? "exponential_decay" : "subexponential"; }

namespace {

double aic(double rss, std::size_t n, int k) {
    const double nn = static_cast<double>(n);
    return nn * std::log(std::max(rss, 1e-300 * nn) / nn) + 2.0 * k;
}

}  // namespace

WavefrontVerdict classify_series(const std::vector<double>& lambdas, const std::vector<double>& abs_T,
                                 const std::vector<double>& rounding, const ClassifierOptions& opt) {
    WavefrontVerdict v;
    v.lambdas = lambdas;
    bool all_underflow = true;
    std::vector<double> lam, y;
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
        v.log_abs_T.push_back(abs_T[i] > 0.0 ? std::log(abs_T[i]) : -std::numeric_limits<double>::infinity());
        if (abs_T[i] >= 1e-300) all_underflow = false;
        if (abs_T[i] > 64.0 * rounding[i] && abs_T[i] >= 1e-300) {
            lam.push_back(lambdas[i]);
            y.push_back(std::log(abs_T[i]));
        }
    }
    v.resolved = lam.size();
    if (all_underflow) {
        v.classification = Decay::exponential_decay;
        v.fitted_rate = -std::numeric_limits<double>::infinity();
        v.rule = "all values below the underflow floor";
        return v;
    }
    if (lam.size() < 4) {
        v.classification = Decay::exponential_decay;
        v.fitted_rate = -std::numeric_limits<double>::infinity();
        v.rule = "decays into the rounding floor within the lambda range";
        return v;
    }
    const std::size_t n = lam.size();
    std::vector<double> loglam(n);
    for (std::size_t i = 0; i < n; ++i) loglam[i] = std::log(lam[i]);
    const auto lin = fit_line(lam, y);
    const auto pow_fit = fit_line(loglam, y);
    Eigen::MatrixXd A(n, 3);
    Eigen::VectorXd b(n);
    for (std::size_t i = 0; i < n; ++i) {
        A(i, 0) = 1.0;
        A(i, 1) = lam[i];
        A(i, 2) = loglam[i];
        b(i) = y[i];
    }
    const Eigen::VectorXd c = A.colPivHouseholderQr().solve(b);
    const double rss_c = (A * c - b).squaredNorm();
    double mean = b.mean(), syy = (b.array() - mean).square().sum();
    v.combined_rate = c(1);
    v.power_exponent = -c(2);
    v.confidence = syy > 0.0 ? 1.0 - rss_c / syy : 1.0;
    v.aic_linear = aic(lin.rss, n, 2);
    v.aic_power = aic(pow_fit.rss, n, 2);
    v.aic_combined = aic(rss_c, n, 3);
    const bool linear_preferred = v.aic_linear < v.aic_power;
    v.fitted_rate = linear_preferred ? v.combined_rate : 0.0;
    const bool expo = v.fitted_rate < -opt.rate_floor && v.confidence >= opt.min_r2;
    v.classification = expo ? Decay::exponential_decay : Decay::subexponential;
    std::ostringstream os;
    os << "combined fit log|T| = c + r*lambda - p*log(lambda); exponential iff r < -" << opt.rate_floor
       << ", AIC(linear) < AIC(power) and R^2 >= " << opt.min_r2;
    v.rule = os.str();
    return v;
}

WavefrontVerdict classify_point(const UniformSamples& u, const FBIProbe& probe, const ClassifierOptions& opt) {
    probe.validate();
    std::vector<double> absT, bound;
    for (double lam : probe.lambda_seq) {
        const auto t = fbi_transform_detailed(u, probe.x0, probe.xi0, lam, probe.cutoff);
        absT.push_back(std::abs(t.value));
        bound.push_back(t.rounding_bound);
    }
    return classify_series(probe.lambda_seq, absT, bound, opt);
}

json WavefrontVerdict::to_json() const {
    auto num = [](double x) -> json { return std::isfinite(x) ? json(x) : json(x > 0 ? "inf" : "-inf"); };
    json logs = json::array();
    for (double l : log_abs_T) logs.push_back(num(l));
    return {{"classification", to_string(classification)},
            {"fitted_rate", num(fitted_rate)},
            {"confidence", confidence},
            {"combined_rate", combined_rate},
            {"power_exponent", power_exponent},
            {"aic", {{"linear", aic_linear}, {"power", aic_power}, {"combined", aic_combined}}},
            {"resolved_points", resolved},
            {"rule", rule},
            {"lambda", lambdas},
            {"log_abs_T", logs}};
}

ScanResult singular_support_scan(const UniformSamples& u, const std::vector<double>& x_grid, double xi0,
                                 const std::vector<double>& lambda_seq, const FbiCutoff& chi,
                                 const ClassifierOptions& opt, unsigned threads) {
    ScanResult r;
    r.xi0 = xi0;
    r.x = x_grid;
    r.verdicts.resize(x_grid.size());
    parallel_for(x_grid.size(), threads, [&](std::size_t i) {
        FBIProbe p;
        p.x0 = x_grid[i];
        p.xi0 = xi0;
        p.lambda_seq = lambda_seq;
        p.cutoff = chi.at(x_grid[i]);
        r.verdicts[i] = classify_point(u, p, opt);
    });
    for (std::size_t i = 0; i < x_grid.size(); ++i)
        if (r.verdicts[i].classification == Decay::subexponential) r.flagged.push_back(x_grid[i]);
    return r;
}

json ScanResult::to_json() const {
    json pts = json::array();
    for (std::size_t i = 0; i < x.size(); ++i) {
        auto v = verdicts[i].to_json();
        v["x"] = x[i];
        pts.push_back(v);
    }
    return {{"xi0", xi0}, {"flagged", flagged}, {"points", pts}};
}

std::string ScanResult::heatmap_csv() const {
    std::ostringstream os;
    os.precision(17);
    os << "x,lambda,log_abs_T\n";
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = 0; j < verdicts[i].lambdas.size(); ++j)
            os << x[i] << ',' << verdicts[i].lambdas[j] << ',' << verdicts[i].log_abs_T[j] << '\n';
    return os.str();
}

double hausdorff_cells(const std::vector<double>& a, const std::vector<double>& b, double cell) {
    if (a.empty() && b.empty()) return 0.0;
    if (a.empty() || b.empty()) return std::numeric_limits<double>::infinity();
    auto directed = [](const std::vector<double>& p, const std::vector<double>& q) {
        double d = 0.0;
        for (double x : p) {
            double m = std::numeric_limits<double>::infinity();
            for (double y : q) m = std::min(m, std::abs(x - y));
            d = std::max(d, m);
        }
        return d;
    };
    return std::max(directed(a, b), directed(b, a)) / cell;
}

namespace {

struct WitnessValue {
    double abs = 0.0;
    double bound = 0.0;
};

WitnessValue witness_integral(const UniformSamples& w, const FbiCutoff& chi, double alpha, double beta, double lam) {
    cplx acc = 0.0;
    double mag = 0.0;
    for (std::size_t k = 0; k < w.values.size(); ++k) {
        const double E = w.x(k);
        const double c = chi(E);
        if (c == 0.0 || w.values[k] == 0.0) continue;
        const double d = alpha - E;
        const double amp = c * w.values[k] * std::exp(-0.5 * lam * d * d);
        acc += amp * std::polar(1.0, lam * beta * d);
        mag += std::abs(amp);
    }
    return {std::abs(acc) * w.step, mag * w.step * std::numeric_limits<double>::epsilon()};
}

}  // namespace

Witness probe_sequence_witness(const EnergyDistribution& omega, double E0, const WitnessOptions& opt) {
    if (opt.lambda_seq.size() < 3) throw ConfigError("witness search needs at least 3 lambda values");
    const auto w = UniformSamples::from(omega);
    FbiCutoff chi;
    chi.center = E0;
    chi.radius = opt.chi_radius;
    chi.edge = opt.chi_edge;
    if (E0 - opt.chi_radius < std::max(1.0, w.lo()) - 1e-12 || E0 + opt.chi_radius > w.hi() + 1e-12)
        throw ConfigError("witness cutoff must lie inside the omega grid and in E >= 1");
    Witness out;
    std::vector<double> absI, bounds;
    for (double lam : opt.lambda_seq) {
        check_fbi_resolution(w.step, opt.beta_hi, lam);
        WitnessRow best;
        double best_abs = -1.0;
        auto search = [&](double a_lo, double a_hi, double b_lo, double b_hi, int na, int nb) {
            for (int i = 0; i < na; ++i)
                for (int j = 0; j < nb; ++j) {
                    const double a = a_lo + (a_hi - a_lo) * i / (na - 1);
                    const double b = b_lo + (b_hi - b_lo) * j / (nb - 1);
                    const auto v = witness_integral(w, chi, a, b, lam);
                    if (v.abs > best_abs) {
                        best_abs = v.abs;
                        best = {a, lam, 0.0, b, v.abs};
                    }
                }
        };
        search(E0 - opt.alpha_radius, E0 + opt.alpha_radius, opt.beta_lo, opt.beta_hi, 21, 9);
        const double da = opt.alpha_radius / 10.0, db = (opt.beta_hi - opt.beta_lo) / 8.0;
        search(std::max(E0 - opt.alpha_radius, best.alpha - da), std::min(E0 + opt.alpha_radius, best.alpha + da),
               std::max(opt.beta_lo, best.beta - db), std::min(opt.beta_hi, best.beta + db), 11, 11);
        best.epsilon = best_abs > 0.0 ? -std::log(best_abs) / lam : std::numeric_limits<double>::infinity();
        out.rows.push_back(best);
        absI.push_back(best_abs);
        bounds.push_back(witness_integral(w, chi, best.alpha, best.beta, lam).bound);
    }
    out.epsilon_decreasing = true;
    for (std::size_t i = 1; i < out.rows.size(); ++i)
        if (out.rows[i].epsilon > out.rows[i - 1].epsilon) out.epsilon_decreasing = false;
    const auto verdict = classify_series(opt.lambda_seq, absI, bounds, ClassifierOptions{opt.rate_floor, 0.9});
    out.asymptotic_rate = verdict.fitted_rate;
    const double eps_last = out.rows.back().epsilon;
    if (absI.back() == 0.0) {
        out.reason = "integral vanishes identically";
    } else if (verdict.classification == Decay::exponential_decay) {
        out.reason = "exponential decay in lambda: omega is analytic near E0 for this cutoff";
    } else if (!(eps_last <= opt.eps_target)) {
        out.reason = "epsilon at the largest lambda exceeds the target";
    } else {
        out.found = true;
        out.reason = "witness found";
    }
    return out;
}

json Witness::to_json() const {
    json rows_j = json::array();
    for (const auto& r : rows) {
        rows_j.push_back({{"alpha", r.alpha},
                          {"lambda", r.lambda},
                          {"epsilon", std::isfinite(r.epsilon) ? json(r.epsilon) : json("inf")},
                          {"beta", r.beta},
                          {"abs_integral", r.value}});
    }
    return {{"found", found},
            {"epsilon_decreasing", epsilon_decreasing},
            {"asymptotic_rate", std::isfinite(asymptotic_rate) ? json(asymptotic_rate) : json("-inf")},
            {"reason", reason},
            {"rows", rows_j}};
}

}  // namespace reslab
