// Acceptance report: one line per criterion, exit status 1 if any criterion fails.
#include "reslab/bessel.hpp"
#include "reslab/dirac.hpp"
#include "reslab/experiment.hpp"
#include "reslab/fbi.hpp"
#include "reslab/io.hpp"
#include "reslab/phasespace.hpp"
#include "reslab/symbols.hpp"
#include "reslab/traces.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

using namespace reslab;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

int failures = 0;

void criterion(const std::string& id, const std::string& name, double time_limit_s,
               const std::function<Outcome()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = time_limit_s <= 0.0 || secs <= time_limit_s;
    const bool pass = o.pass && in_time;
    if (!pass) ++failures;
    char timing[96];
    if (time_limit_s > 0.0)
        std::snprintf(timing, sizeof timing, "%.1f s (limit %.0f s)", secs, time_limit_s);
    else
        std::snprintf(timing, sizeof timing, "%.1f s", secs);
    std::printf("criterion %s [%s] %s: %s; %s\n", id.c_str(), pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str(),
                timing);
    std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
    char b[128];
    std::snprintf(b, sizeof b, f, a);
    return b;
}

std::vector<double> grid(double lo, double hi, double h) {
    std::vector<double> g;
    const long n = std::lround((hi - lo) / h);
    for (long k = 0; k <= n; ++k) g.push_back(lo + k * h);
    return g;
}

UniformSamples sampled(const std::function<double(double)>& f, double step) {
    return UniformSamples::sample(f, -6.0, 6.0, step);
}

double heaviside(double y) { return y > 0.0 ? 1.0 : (y == 0.0 ? 0.5 : 0.0); }

const fs::path kWork = fs::temp_directory_path() / "reslab_acceptance";

}  // namespace

int main() {
    fs::remove_all(kWork);
    fs::create_directories(kWork);
    const auto v2 = ScalarPotential::gaussian(0.5);
    const auto v0 = ScalarPotential::zero();

    criterion("1", "convolution identity", 60.0, [&] {
        const double h = 1e-3;
        auto nm = build_nu_mu(v0, v2, grid(h, 0.6, h));
        auto om = omega(v0, v2, grid(1.05, 1.6, h));
        auto rep = convolution_check(nm.nu, om.direct, 1);
        const double ratio = rep.max_residual / rep.max_abs_omega;
        return Outcome{ratio <= 1e-2, fmt("max|omega - phi*mu| / max|omega| = %.3e (<= 1e-2)", ratio)};
    });

    criterion("2", "Bessel symbol", 10.0, [&] {
        auto cert = decay_and_ellipticity(1, logspace(20.0, 2000.0, 50));
        double rec = 0.0;
        for (double r : {0.5, 2.0, 8.0, 12.0, 30.0, 300.0})
            for (double a : {0.0, 0.5, 1.0, 1.5707}) rec = std::max(rec, BesselEvaluator::recurrence_residual(std::polar(r, a)));
        double pair = 0.0;
        for (double x0 : {10.0, 15.0, 25.0, -12.0})
            for (int s : {1, -1}) pair = std::max(pair, pairing_oracle(s, x0).relative_difference);
        const bool slope_ok = std::abs(cert.fit_slope + 2.5) <= 0.05;
        const bool ok = slope_ok && cert.ellipticity_floor > 0.0 && rec <= 1e-10 && pair <= 1e-6;
        return Outcome{ok, fmt("fitted exponent %.4f (target -2.5 +- 0.05)", cert.fit_slope) +
                               fmt(", floor %.3e (> 0)", cert.ellipticity_floor) +
                               fmt(", recurrence %.2e (<= 1e-10)", rec) + fmt(", pairing %.2e (<= 1e-6)", pair)};
    });

    criterion("3", "FBI classifier", 120.0, [&] {
        FbiCutoff off;
        off.enabled = false;
        // closed forms: Gaussian at lambda = 10 (relative) and 100 (absolute, below the rounding floor relative),
        // Heaviside (erfc) at lambda = 100 and 400
        auto g = sampled([](double y) { return std::exp(-0.5 * y * y); }, 1e-3);
        const double g10 = std::abs(std::abs(fbi_transform(g, 0, 1, 10.0, off)) / 0.0135191803720976650 - 1.0);
        const auto g100v = fbi_transform_detailed(g, 0, 1, 100.0, off);
        const double g100 = std::abs(std::abs(g100v.value) - 7.4786811562204957e-22);
        auto hf = UniformSamples::sample(heaviside, -3.0, 3.0, 1e-5);
        double hrel = 0.0;
        for (double xi : {1.0, -1.0}) {
            hrel = std::max(hrel, std::abs(std::abs(fbi_transform(hf, 0, xi, 100.0, off)) / 0.0957370179325163325 - 1.0));
            hrel = std::max(hrel, std::abs(std::abs(fbi_transform(hf, 0, xi, 400.0, off)) / 0.0671738448870504896 - 1.0));
        }
        bool classes = true;
        for (double xi : {1.0, -1.0}) {
            FBIProbe p;
            p.xi0 = xi;
            p.lambda_seq = default_lambda_sequence();
            classes = classes && classify_point(g, p).classification == Decay::exponential_decay;
            classes = classes && classify_point(sampled(heaviside, 1e-3), p).classification == Decay::subexponential;
        }
        const double h = 1e-3, cell = 0.01;
        auto mu = build_nu_mu(v0, v2, grid(h, 1.0, h)).mu;
        auto scan = singular_support_scan(UniformSamples::from(mu), grid(0.35, 0.65, cell), 1.0, default_lambda_sequence());
        double nearest = INFINITY;
        for (double x : scan.flagged) nearest = std::min(nearest, std::abs(x - v2.sup_v()));
        const bool ok = classes && g10 <= 1e-6 && g100 <= 1e-6 && hrel <= 1e-6 && nearest <= cell * (1 + 1e-9);
        return Outcome{ok, std::string("classes ") + (classes ? "ok" : "wrong") +
                               fmt(", Gaussian rel err (lambda 10) %.2e", g10) +
                               fmt(", abs err (lambda 100) %.2e", g100) + fmt(", Heaviside rel err %.2e", hrel) +
                               fmt(", flagged point nearest to sup v2 at distance %.3g", nearest) +
                               fmt(" (cell %.2g)", cell) + ", flagged " + std::to_string(scan.flagged.size()) +
                               " of " + std::to_string(scan.x.size())};
    });

    criterion("4", "elliptic invariance", 120.0, [&] {
        const double h = 1e-3, cell = 0.01;
        auto mu = build_nu_mu(v0, v2, grid(h, 1.0, h)).mu.shifted(1.0);
        EnergyDistribution a = mu;
        a.grid = grid(1.0 + h, 2.0, h);
        a.values = convolve(kernel_phi_tilde_plus(), to_cumulative(mu), a.grid);
        const auto xs = grid(1.35, 1.65, cell);
        auto s1 = singular_support_scan(UniformSamples::from(mu), xs, 1.0, default_lambda_sequence());
        auto s2 = singular_support_scan(UniformSamples::from(a), xs, 1.0, default_lambda_sequence());
        const double d = hausdorff_cells(s1.flagged, s2.flagged, cell);
        auto range = [](const std::vector<double>& f) {
            return f.empty() ? std::string("{}") : fmt("[%.2f, ", f.front()) + fmt("%.2f]", f.back());
        };
        return Outcome{d <= 1.0, fmt("Hausdorff distance %.0f cells (<= 1)", d) + ", flagged tau1 mu " +
                                     range(s1.flagged) + ", flagged phi~+ * tau1 mu " + range(s2.flagged)};
    });

    criterion("5", "resonance machinery", 600.0, [&] {
        const ComplexRect w{1.35, 1.6, -0.2, 0.0};
        auto free = resonances(v0, 0.1, {0.0, 0.5}, {0.0, 0.55}, w, 3);
        auto lit = resonances(v2, 0.1, {0.0, 0.1}, {0.0, 0.15}, w, 3);
        int stable = 0;
        for (const auto& e : lit.entries)
            if (e.certified && std::abs(e.z.real() - 1.5) < 0.1) ++stable;
        const bool ok = free.count() == 0 && free.window_admissible && stable >= 1;
        return Outcome{ok, "free potential: " + std::to_string(free.count()) +
                               " stable; Gaussian with theta in {0.1i, 0.15i}: " + std::to_string(stable) +
                               " stable of " + std::to_string(lit.candidates) + " candidates" +
                               fmt(", window clearance %.3f", lit.window_clearance) +
                               (lit.window_admissible ? "" : " (window meets the essential curve)")};
    });

    criterion("5b", "resonance machinery, theta in {0.5i, 0.55i}", 600.0, [&] {
        const ComplexRect w{1.35, 1.6, -0.2, 0.0};
        auto set = resonances(v2, 0.1, {0.0, 0.5}, {0.0, 0.55}, w, 3);
        const ResonanceEntry* best = nullptr;
        for (const auto& e : set.entries)
            if (e.certified && (!best || std::abs(e.z - 1.5) < std::abs(best->z - 1.5))) best = &e;
        if (!best) return Outcome{false, "no stable eigenvalue"};
        const bool ok = set.window_admissible && best->stability_gap <= 1e-4 && best->grid_shift <= 1e-4;
        return Outcome{ok, fmt("z = %.7f", best->z.real()) + fmt("%+.7fi", best->z.imag()) +
                               fmt(", gap %.2e (<= 1e-4)", best->stability_gap) +
                               fmt(", grid-doubling shift %.2e (<= 1e-4)", best->grid_shift)};
    });

    criterion("6", "scaling law", 3600.0, [&] {
        ConfigOverrides ov;
        ov.output_dir = kWork / "lower_bound";
        auto res = run_config_file(fs::path(RESLAB_CONFIG_DIR) / "lower_bound.json", ov);
        if (res.exit_code != 0) return Outcome{false, "run failed: " + res.message};
        auto s = nlohmann::json::parse(read_file(kWork / "lower_bound" / "scaling.json"));
        std::string counts;
        for (const auto& r : s["rows"]) counts += (counts.empty() ? "" : ", ") + fmt("N(%.2g)=", r["hbar"].get<double>()) +
                                                  std::to_string(r["count"].get<int>());
        const double slope = s["slope"].is_number() ? s["slope"].get<double>() : NAN;
        const double ratio = s["halving_ratio"].is_number() ? s["halving_ratio"].get<double>() : NAN;
        const bool ok = slope >= 2.5 && ratio >= 4.0 && ratio <= 16.0;
        return Outcome{ok, counts + fmt(", slope %.3f (>= 2.5)", slope) + fmt(", N(0.05)/N(0.1) = %.3f (in [4, 16])", ratio)};
    });

    criterion("7", "trace formula residual", 1800.0, [&] {
        auto v1 = tabulate(mollify_split(v2, mollification_radius(v2, 1e-3)));
        auto tf = TestFunctionSpec::polynomial({1.2, 1.7, 0.1}, {1.0});
        auto t = bruneau_robert_residual(v1, v2, {0.2, 0.1, 0.05}, tf, 4.0);
        const auto& last = t.rows.back();
        const bool ok = last.relative <= 0.25 && t.residual_order <= 2.5 && std::abs(t.operator_slope - 3.0) <= 0.3 &&
                        std::abs(t.phase_space_slope - 3.0) <= 0.3 && last.converged;
        return Outcome{ok, fmt("relative gap at hbar 0.05 = %.4f (<= 0.25)", last.relative) +
                               fmt(", residual order %.3f (<= 2.5)", t.residual_order) +
                               fmt(", slopes %.3f", t.operator_slope) + fmt(" / %.3f (3 +- 0.3)", t.phase_space_slope)};
    });

    criterion("8", "mollification", 120.0, [&] {
        const double C0 = std::pow(2.0 * M_PI, -1.5);
        const double mass = integrate([&](double r) { return 4 * M_PI * r * r * C0 * std::exp(-0.5 * r * r); }, 0.0, 40.0,
                                      1e-13)
                                .value;
        double kernel_dev = std::abs(mass - 1.0);
        for (double rho : {0.0, 5.0, 50.0})
            for (double lam : {0.05, 0.5}) kernel_dev = std::max(kernel_dev, std::abs(mollifier_mass(rho, lam) - 1.0));
        const double eps0 = 1e-3, R = mollification_radius(v2, eps0);
        auto g1 = mollify_split(v2, R);
        double sup = 0.0;
        for (double r = 0.0; r <= 15.0; r += 0.05) sup = std::max(sup, std::abs(g1.radial(r)));
        auto l2 = ScalarPotential::lorentz(1.0, 4.0);
        auto l1 = mollify_split(l2, 10.0);
        auto rs = logspace(50.0, 400.0, 8);
        std::vector<double> d;
        for (double r : rs) d.push_back(std::abs(mollification_defect(l1, r)));
        const double expo = -fit_loglog(rs, d).slope;
        auto b1 = mollify_split(ScalarPotential::bump(0.5, 1.0), 2.0);
        bool zero = true;
        for (double r = 0.0; r <= 10.0; r += 0.1) zero = zero && b1.radial(r) == 0.0;
        const bool ok = kernel_dev <= 1e-8 && sup <= eps0 && expo >= 3.8 && zero;
        return Outcome{ok, fmt("|int K - 1| = %.1e (<= 1e-8)", kernel_dev) + fmt(", sup|v1| = %.3e", sup) +
                               fmt(" (<= %.0e)", eps0) + fmt(", defect exponent %.2f (>= 3.8)", expo) +
                               (zero ? ", compact support gives v1 = 0" : ", compact support gives v1 != 0")};
    });

    criterion("9", "determinism", 0.0, [&] {
        int identical = 0, total = 0;
        for (const char* name : {"phasespace.json", "symbol.json", "fbi_mu.json", "resonances.json"}) {
            for (const char* tag : {"a", "b"}) {
                ConfigOverrides ov;
                ov.output_dir = kWork / "det" / name / tag;
                auto r = run_config_file(fs::path(RESLAB_CONFIG_DIR) / name, ov);
                if (r.exit_code != 0) return Outcome{false, std::string(name) + ": " + r.message};
            }
            for (const auto& e : fs::directory_iterator(kWork / "det" / name / "a")) {
                ++total;
                if (read_file(e.path()) == read_file(kWork / "det" / name / "b" / e.path().filename())) ++identical;
            }
        }
        return Outcome{identical == total, std::to_string(identical) + " of " + std::to_string(total) +
                                               " artifacts byte-identical across repeated runs"};
    });

    std::printf("%d criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
