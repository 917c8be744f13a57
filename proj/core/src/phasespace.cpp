#include "reslab/phasespace.hpp"

#include "reslab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace reslab {

using nlohmann::json;

namespace {

constexpr double kPi = std::numbers::pi;

double scan_radius(const ScalarPotential& v) {
    if (v.sup_abs() == 0.0) return 0.0;
    return std::min(1e3, v.radius_below(std::max(1e-300, 1e-12 * v.sup_abs())));
}

std::vector<double> level_crossings(const ScalarPotential& v, double level, double r_hi, std::size_t samples = 4001) {
    if (r_hi <= 0.0) return {};
    return bracket_roots([&](double r) { return v.radial(r) - level; }, 0.0, r_hi, samples);
}

// 4 pi int_0^inf r^2 f(r) dr with panels split at the given radii.
double radial_integral(const std::function<double(double)>& f, std::vector<double> breaks, double r_far,
                       double rel_tol = 1e-11) {
    auto g = [&](double r) { return r * r * f(r); };
    breaks.push_back(0.0);
    breaks.push_back(r_far);
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
    std::vector<double> pts;
    for (double b : breaks)
        if (b >= 0.0 && b <= r_far) pts.push_back(b);
    double total = integrate_panels(g, pts, rel_tol, 20).value;
    total += integrate(g, r_far, std::numeric_limits<double>::infinity(), rel_tol, 12).value;
    return 4.0 * kPi * total;
}

double F32(double y) {
    const double q = y * y - 1.0;
    return q > 0.0 ? q * std::sqrt(q) : 0.0;
}

// Grid points for the radial integrals: crossings of v_j = E - 1 and v_j = E + 1.
std::vector<double> kink_radii(const ScalarPotential& v1, const ScalarPotential& v2, double E, double r_far) {
    std::vector<double> out;
    for (const auto* v : {&v1, &v2}) {
        if (v->sup_abs() == 0.0) continue;
        for (double lvl : {E - 1.0, E + 1.0}) {
            if (lvl > v->sup_v() || lvl < v->inf_v()) continue;
            auto r = level_crossings(*v, lvl, r_far);
            out.insert(out.end(), r.begin(), r.end());
        }
    }
    return out;
}

void require_radial(const ScalarPotential& v, const char* what) {
    if (!v.is_radial()) throw DomainError(std::string(what) + ": general potentials require the QMC route");
}

double qmc_integral(const std::function<double(const Vec3&)>& f, double L, std::uint64_t seed, std::size_t n,
                    double* std_error) {
    constexpr int kShifts = 8;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    auto radical_inverse = [](std::size_t i, unsigned base) {
        double f = 1.0, r = 0.0;
        while (i > 0) {
            f /= base;
            r += f * static_cast<double>(i % base);
            i /= base;
        }
        return r;
    };
    std::vector<double> est;
    const double vol = 8.0 * L * L * L;
    for (int m = 0; m < kShifts; ++m) {
        const double s0 = unif(rng), s1 = unif(rng), s2 = unif(rng);
        double acc = 0.0;
        for (std::size_t i = 1; i <= n; ++i) {
            double u0 = radical_inverse(i, 2) + s0, u1 = radical_inverse(i, 3) + s1, u2 = radical_inverse(i, 5) + s2;
            u0 -= std::floor(u0);
            u1 -= std::floor(u1);
            u2 -= std::floor(u2);
            acc += f({L * (2 * u0 - 1), L * (2 * u1 - 1), L * (2 * u2 - 1)});
        }
        est.push_back(vol * acc / static_cast<double>(n));
    }
    double mean = 0.0;
    for (double e : est) mean += e;
    mean /= kShifts;
    double var = 0.0;
    for (double e : est) var += (e - mean) * (e - mean);
    var /= (kShifts - 1);
    if (std_error) *std_error = std::sqrt(var / kShifts);
    return mean;
}

}  // namespace

double EnergyDistribution::max_abs() const {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
}

double EnergyDistribution::spacing() const {
    if (grid.size() < 2) throw ConfigError("energy grid needs at least two points");
    const double h = (grid.back() - grid.front()) / static_cast<double>(grid.size() - 1);
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (std::abs(grid[i] - grid[i - 1] - h) > 1e-6 * h) throw ConfigError("energy grid is not uniform");
    return h;
}

EnergyDistribution EnergyDistribution::shifted(double a) const {
    EnergyDistribution d = *this;
    for (auto& e : d.grid) e += a;
    d.support_lo += a;
    d.support_hi += a;
    d.origin += a;
    d.name = name + "_shift";
    return d;
}

json EnergyDistribution::sidecar() const {
    return {{"name", name},
            {"samples", grid.size()},
            {"kind", kind == SampleKind::density ? "density" : "cumulative"},
            {"support", {support_lo, support_hi}},
            {"order", order},
            {"provenance", provenance}};
}

VolumeEstimate level_set_volume(const ScalarPotential& v, double E, Side side, std::uint64_t seed,
                                std::size_t qmc_points) {
    if (E == 0.0 || (side == Side::geq && E < 0.0) || (side == Side::leq && E > 0.0))
        throw DomainError("level set volume diverges for this energy and side");
    VolumeEstimate out;
    const double R = v.radius_below(std::abs(E));
    if ((side == Side::geq && E > v.sup_v()) || (side == Side::leq && E < v.inf_v()) || R <= 0.0) {
        out.method = "empty";
        return out;
    }
    auto inside = [&](double val) { return side == Side::geq ? val >= E : val <= E; };
    if (v.is_radial()) {
        const double r_hi = R * (1.0 + 1e-9) + 1e-12;
        auto roots = level_crossings(v, E, r_hi, 8001);
        std::vector<double> pts{0.0};
        pts.insert(pts.end(), roots.begin(), roots.end());
        pts.push_back(r_hi);
        double vol = 0.0;
        for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
            const double a = pts[k], b = pts[k + 1];
            if (b <= a) continue;
            if (inside(v.radial(0.5 * (a + b)))) vol += 4.0 * kPi / 3.0 * (b * b * b - a * a * a);
        }
        out.value = vol;
        out.method = "radial";
        return out;
    }
    double se = 0.0;
    out.value = qmc_integral([&](const Vec3& x) { return inside(v(x)) ? 1.0 : 0.0; }, R, seed, qmc_points, &se);
    out.std_error = se;
    out.method = "qmc";
    return out;
}

void reject_plateaus(const ScalarPotential& v) {
    if (!v.is_radial() || v.sup_abs() == 0.0) return;
    const double R = std::min(scan_radius(v), 100.0);
    const auto rs = linspace(R / 4000.0, R, 4000);
    int run = 0;
    for (double r : rs) {
        const double val = v.radial(r);
        if (std::abs(val) > 1e-12 && std::abs(v.derivative(r)) < 1e-12) {
            if (++run >= 3) throw DomainError("potential has a flat plateau; atoms of mu are out of scope");
        } else {
            run = 0;
        }
    }
}

namespace {

// Central differences on each same-sign run of the grid, one-sided (second order) at run ends.
std::vector<double> differentiate(const std::vector<double>& E, const std::vector<double>& f) {
    const std::size_t n = E.size();
    std::vector<double> d(n, 0.0);
    std::size_t start = 0;
    while (start < n) {
        std::size_t end = start;
        while (end + 1 < n && (E[end + 1] > 0.0) == (E[start] > 0.0)) ++end;
        const std::size_t m = end - start + 1;
        for (std::size_t i = start; i <= end; ++i) {
            if (m == 1) {
                d[i] = 0.0;
            } else if (m == 2) {
                d[i] = (f[end] - f[start]) / (E[end] - E[start]);
            } else if (i == start) {
                const double h = E[i + 1] - E[i];
                d[i] = (-3 * f[i] + 4 * f[i + 1] - f[i + 2]) / (2 * h);
            } else if (i == end) {
                const double h = E[i] - E[i - 1];
                d[i] = (3 * f[i] - 4 * f[i - 1] + f[i - 2]) / (2 * h);
            } else {
                d[i] = (f[i + 1] - f[i - 1]) / (E[i + 1] - E[i - 1]);
            }
        }
        start = end + 1;
    }
    return d;
}

EnergyDistribution make_dist(std::string name, const std::vector<double>& grid, std::vector<double> values,
                             SampleKind kind, double lo, double hi, int order) {
    EnergyDistribution d;
    d.name = std::move(name);
    d.grid = grid;
    d.values = std::move(values);
    d.kind = kind;
    d.support_lo = lo;
    d.support_hi = hi;
    d.order = order;
    return d;
}

}  // namespace

NuMu build_nu_mu(const ScalarPotential& v1, const ScalarPotential& v2, const std::vector<double>& grid,
                 std::uint64_t seed, unsigned threads) {
    if (grid.size() < 3) throw ConfigError("energy grid needs at least three points");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (grid[i] == 0.0) throw ConfigError("energy grid must avoid E = 0");
        if (i > 0 && !(grid[i] > grid[i - 1])) throw ConfigError("energy grid must be strictly increasing");
    }
    reject_plateaus(v1);
    reject_plateaus(v2);
    const std::size_t n = grid.size();
    std::vector<double> np1(n, 0.0), np2(n, 0.0), nm1(n, 0.0), nm2(n, 0.0);
    parallel_for(n, threads, [&](std::size_t i) {
        const double E = grid[i];
        if (E > 0.0) {
            np1[i] = -level_set_volume(v1, E, Side::geq, seed + i).value;
            np2[i] = -level_set_volume(v2, E, Side::geq, seed + i).value;
        } else {
            nm1[i] = level_set_volume(v1, E, Side::leq, seed + i).value;
            nm2[i] = level_set_volume(v2, E, Side::leq, seed + i).value;
        }
    });
    auto mp1 = differentiate(grid, np1), mp2 = differentiate(grid, np2);
    auto mm1 = differentiate(grid, nm1), mm2 = differentiate(grid, nm2);
    for (std::size_t i = 0; i < n; ++i) {
        if (grid[i] > 0.0) {
            mm1[i] = mm2[i] = 0.0;
        } else {
            mp1[i] = mp2[i] = 0.0;
        }
    }
    std::vector<double> mu(n), nu(n);
    for (std::size_t i = 0; i < n; ++i) {
        mu[i] = grid[i] > 0.0 ? mp2[i] - mp1[i] : mm2[i] - mm1[i];
        nu[i] = grid[i] > 0.0 ? np2[i] - np1[i] : nm2[i] - nm1[i];
    }
    const double lo = std::min({v1.inf_v(), v2.inf_v(), 0.0}), hi = std::max({v1.sup_v(), v2.sup_v(), 0.0});
    NuMu out;
    out.nu_plus_1 = make_dist("nu_plus_1", grid, np1, SampleKind::cumulative, 0.0, std::max(0.0, v1.sup_v()), 0);
    out.nu_plus_2 = make_dist("nu_plus_2", grid, np2, SampleKind::cumulative, 0.0, std::max(0.0, v2.sup_v()), 0);
    out.nu_minus_1 = make_dist("nu_minus_1", grid, nm1, SampleKind::cumulative, std::min(0.0, v1.inf_v()), 0.0, 0);
    out.nu_minus_2 = make_dist("nu_minus_2", grid, nm2, SampleKind::cumulative, std::min(0.0, v2.inf_v()), 0.0, 0);
    out.mu_plus_1 = make_dist("mu_plus_1", grid, mp1, SampleKind::density, 0.0, std::max(0.0, v1.sup_v()), 0);
    out.mu_plus_2 = make_dist("mu_plus_2", grid, mp2, SampleKind::density, 0.0, std::max(0.0, v2.sup_v()), 0);
    out.mu_minus_1 = make_dist("mu_minus_1", grid, mm1, SampleKind::density, std::min(0.0, v1.inf_v()), 0.0, 0);
    out.mu_minus_2 = make_dist("mu_minus_2", grid, mm2, SampleKind::density, std::min(0.0, v2.inf_v()), 0.0, 0);
    out.mu = make_dist("mu", grid, mu, SampleKind::density, lo, hi, 1);
    out.nu = make_dist("nu", grid, nu, SampleKind::cumulative, lo, hi, 1);
    const json prov = {{"v1", v1.describe()}, {"v2", v2.describe()}, {"method", "level sets + central differences"}};
    for (auto* d : {&out.nu_plus_1, &out.nu_plus_2, &out.nu_minus_1, &out.nu_minus_2, &out.mu_plus_1, &out.mu_plus_2,
                    &out.mu_minus_1, &out.mu_minus_2, &out.mu, &out.nu})
        d->provenance = prov;
    return out;
}

int branch_sign(const ScalarPotential& v1, const ScalarPotential& v2, double E) {
    const auto t1 = thresholds(v1), t2 = thresholds(v2);
    if (E > std::max(t1.l_plus, t2.l_plus)) return 1;
    if (E < std::min(t1.l_minus, t2.l_minus)) return -1;
    throw DomainError("energy lies between thresholds (forbidden band)");
}

double rho_at(const ScalarPotential& v1, const ScalarPotential& v2, double E) {
    const int s = branch_sign(v1, v2, E);
    if (v1.is_radial() && v2.is_radial()) {
        const double r_far = std::max(scan_radius(v1), scan_radius(v2));
        if (r_far == 0.0) return 0.0;
        auto f = [&](double r) { return F32(E - v2.radial(r)) - F32(E - v1.radial(r)); };
        return s * (8.0 * kPi / 3.0) * radial_integral(f, kink_radii(v1, v2, E, r_far), r_far);
    }
    const double L = std::max(v1.radius_below(1e-10), v2.radius_below(1e-10));
    return s * (8.0 * kPi / 3.0) *
           qmc_integral([&](const Vec3& x) { return F32(E - v2(x)) - F32(E - v1(x)); }, L, 0x5eed, 1u << 16, nullptr);
}

double rho_via_level_sets(const ScalarPotential& v1, const ScalarPotential& v2, double E) {
    const int s = branch_sign(v1, v2, E);
    auto N = [&](double t) {
        if (t > 0.0)
            return -level_set_volume(v2, t, Side::geq).value + level_set_volume(v1, t, Side::geq).value;
        return level_set_volume(v2, t, Side::leq).value - level_set_volume(v1, t, Side::leq).value;
    };
    auto dF = [](double y) {
        const double q = y * y - 1.0;
        return q > 0.0 ? 3.0 * y * std::sqrt(q) : 0.0;
    };
    auto g = [&](double t) { return N(t) * dF(E - t); };
    const double lo = std::min({v1.inf_v(), v2.inf_v(), 0.0}), hi = std::max({v1.sup_v(), v2.sup_v(), 0.0});
    std::vector<double> pts{lo, 0.0, hi};
    for (double k : {E - 1.0, E + 1.0})
        if (k > lo && k < hi) pts.push_back(k);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return s * (8.0 * kPi / 3.0) * integrate_panels(g, pts, 1e-9, 14).value;
}

EnergyDistribution rho(const ScalarPotential& v1, const ScalarPotential& v2, const std::vector<double>& E_grid,
                       unsigned threads) {
    std::vector<double> vals(E_grid.size());
    for (double E : E_grid) branch_sign(v1, v2, E);
    parallel_for(E_grid.size(), threads, [&](std::size_t i) { vals[i] = rho_at(v1, v2, E_grid[i]); });
    auto d = make_dist("rho", E_grid, vals, SampleKind::cumulative, E_grid.front(), E_grid.back(), 0);
    d.provenance = {{"v1", v1.describe()}, {"v2", v2.describe()}, {"method", "radial Gauss-Kronrod"}};
    return d;
}

double omega_direct_at(const ScalarPotential& v1, const ScalarPotential& v2, double E) {
    const int s = branch_sign(v1, v2, E);
    if (v1.is_radial() && v2.is_radial()) {
        const double r_far = std::max(scan_radius(v1), scan_radius(v2));
        if (r_far == 0.0) return 0.0;
        auto f = [&](double r) { return kernel::phi(E - v2.radial(r)) - kernel::phi(E - v1.radial(r)); };
        return s * radial_integral(f, kink_radii(v1, v2, E, r_far), r_far, 1e-10);
    }
    const double L = std::max(v1.radius_below(1e-10), v2.radius_below(1e-10));
    return s * qmc_integral([&](const Vec3& x) { return kernel::phi(E - v2(x)) - kernel::phi(E - v1(x)); }, L, 0x5eed,
                            1u << 16, nullptr);
}

OmegaResult omega(const ScalarPotential& v1, const ScalarPotential& v2, const std::vector<double>& E_grid,
                  unsigned threads) {
    EnergyDistribution probe;
    probe.grid = E_grid;
    probe.spacing();
    auto r = rho(v1, v2, E_grid, threads);
    OmegaResult out;
    out.finite_difference =
        make_dist("omega_fd", E_grid, differentiate(E_grid, r.values), SampleKind::density, E_grid.front(),
                  E_grid.back(), 1);
    std::vector<double> direct(E_grid.size());
    parallel_for(E_grid.size(), threads, [&](std::size_t i) { direct[i] = omega_direct_at(v1, v2, E_grid[i]); });
    out.direct = make_dist("omega_direct", E_grid, direct, SampleKind::density, E_grid.front(), E_grid.back(), 1);
    for (std::size_t i = 0; i < E_grid.size(); ++i)
        out.max_deviation = std::max(out.max_deviation, std::abs(direct[i] - out.finite_difference.values[i]));
    const json prov = {{"v1", v1.describe()}, {"v2", v2.describe()}};
    out.finite_difference.provenance = prov;
    out.finite_difference.provenance["method"] = "central differences of rho";
    out.direct.provenance = prov;
    out.direct.provenance["method"] = "direct phase-space quadrature";
    return out;
}

namespace kernel {

double phi(double x) {
    const double q = x * x - 1.0;
    return q > 0.0 ? 8.0 * kPi * x * std::sqrt(q) : 0.0;
}
double phi_plus(double x) { return x > 1.0 ? phi(x) : 0.0; }
double phi_minus(double x) { return x < -1.0 ? phi(x) : 0.0; }
double phi_tilde_plus(double x) { return x > 0.0 ? 8.0 * kPi * (x + 1.0) * std::sqrt(x + 2.0) * std::sqrt(x) : 0.0; }
double phi_tilde_minus(double x) { return phi_minus(x - 1.0); }
double Phi(double x) { return (8.0 * kPi / 3.0) * F32(x); }
double Phi_plus(double x) { return x > 1.0 ? Phi(x) : 0.0; }
double Phi_minus(double x) { return x < -1.0 ? Phi(x) : 0.0; }

}  // namespace kernel

Kernel kernel_phi() { return {kernel::phi, kernel::Phi}; }
Kernel kernel_phi_plus() { return {kernel::phi_plus, kernel::Phi_plus}; }
Kernel kernel_phi_minus() { return {kernel::phi_minus, kernel::Phi_minus}; }
Kernel kernel_phi_tilde_plus() { return {kernel::phi_tilde_plus, [](double x) { return kernel::Phi_plus(x + 1.0); }}; }
Kernel kernel_phi_tilde_minus() {
    return {kernel::phi_tilde_minus, [](double x) { return kernel::Phi_minus(x - 1.0); }};
}

EnergyDistribution to_cumulative(const EnergyDistribution& mu) {
    if (mu.kind == SampleKind::cumulative) return mu;
    EnergyDistribution out = mu;
    out.kind = SampleKind::cumulative;
    out.name = mu.name + "_cumulative";
    const std::size_t n = mu.size();
    const double o = mu.origin;
    std::vector<double> N(n, 0.0);
    // Positive energies: N(t) = -int_t^inf mu; negative energies: N(t) = int_-inf^t mu.
    double acc = 0.0;
    for (std::size_t i = n; i-- > 0;) {
        if (mu.grid[i] <= o) break;
        if (i + 1 < n && mu.grid[i + 1] > o)
            acc += 0.5 * (mu.values[i] + mu.values[i + 1]) * (mu.grid[i + 1] - mu.grid[i]);
        N[i] = -acc;
    }
    acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (mu.grid[i] > o) break;
        if (i > 0) acc += 0.5 * (mu.values[i] + mu.values[i - 1]) * (mu.grid[i] - mu.grid[i - 1]);
        N[i] = acc;
    }
    out.values = N;
    return out;
}

std::vector<double> convolve(const Kernel& K, const EnergyDistribution& mu, const std::vector<double>& E) {
    const auto cum = to_cumulative(mu);
    const auto& t = cum.grid;
    const auto& N = cum.values;
    const double o = cum.origin;
    std::vector<double> out(E.size(), 0.0);
    for (std::size_t e = 0; e < E.size(); ++e) {
        const double x = E[e];
        // int_a^b (N0 + s (t - ta)) K'(x - t) dt = [-(N0 + s (t - ta)) K(x - t) - s A(x - t)]_a^b
        auto cell = [&](double a, double b, double N0, double s) {
            auto prim = [&](double tt) { return -(N0 + s * (tt - a)) * K.k(x - tt) - s * K.antiderivative(x - tt); };
            return prim(b) - prim(a);
        };
        double acc = 0.0;
        for (std::size_t i = 0; i + 1 < t.size(); ++i) {
            if ((t[i] > o) != (t[i + 1] > o)) continue;
            const double s = (N[i + 1] - N[i]) / (t[i + 1] - t[i]);
            acc += cell(t[i], t[i + 1], N[i], s);
        }
        // Edge cells between the grid and the origin, with N held constant.
        for (std::size_t i = 0; i < t.size(); ++i) {
            const bool first_pos = t[i] > o && (i == 0 || t[i - 1] <= o);
            const bool last_neg = t[i] < o && (i + 1 == t.size() || t[i + 1] >= o);
            if (first_pos) acc += cell(o, t[i], N[i], 0.0);
            if (last_neg) acc += cell(t[i], o, N[i], 0.0);
        }
        out[e] = acc;
    }
    return out;
}

json ConvolutionReport::to_json() const {
    return {{"sign", sign},
            {"max_residual", max_residual},
            {"l1_residual", l1_residual},
            {"max_abs_omega", max_abs_omega},
            {"relative_max_residual", max_abs_omega > 0 ? max_residual / max_abs_omega : 0.0},
            {"split_max_residual", split_max_residual},
            {"shift_max_deviation", shift_max_deviation}};
}

ConvolutionReport convolution_check(const EnergyDistribution& mu, const EnergyDistribution& omega, int sign) {
    if (sign != 1 && sign != -1) throw ConfigError("convolution_check: sign must be +1 or -1");
    if (mu.grid.size() < 2 || omega.grid.size() < 2) throw ConfigError("convolution_check: empty grids");
    const double h_mu = mu.spacing(), h_om = omega.spacing();
    if (std::abs(h_mu - h_om) > 1e-9 * h_mu) throw ConfigError("convolution_check: grid spacing mismatch");
    ConvolutionReport rep;
    rep.sign = sign;
    const auto& E = omega.grid;
    rep.phi_mu = convolve(kernel_phi(), mu, E);
    const auto cum = to_cumulative(mu);
    const auto split_p = convolve(kernel_phi_tilde_plus(), cum.shifted(1.0), E);
    const auto split_m = convolve(kernel_phi_tilde_minus(), cum.shifted(-1.0), E);
    const auto plain_p = convolve(kernel_phi_plus(), cum, E);
    for (std::size_t i = 0; i < E.size(); ++i) {
        const double r = omega.values[i] - sign * rep.phi_mu[i];
        rep.max_residual = std::max(rep.max_residual, std::abs(r));
        rep.l1_residual += std::abs(r) * h_om;
        rep.max_abs_omega = std::max(rep.max_abs_omega, std::abs(omega.values[i]));
        rep.split_max_residual =
            std::max(rep.split_max_residual, std::abs(omega.values[i] - sign * (split_p[i] + split_m[i])));
        rep.shift_max_deviation = std::max(rep.shift_max_deviation, std::abs(split_p[i] - plain_p[i]));
    }
    return rep;
}

double pair_mu(const ScalarPotential& v1, const ScalarPotential& v2, const std::function<double(double)>& f) {
    require_radial(v1, "pair_mu");
    require_radial(v2, "pair_mu");
    const double r_far = std::max(scan_radius(v1), scan_radius(v2));
    if (r_far == 0.0) return 0.0;
    const double f0 = f(0.0);
    auto g = [&](double r) { return (f(v2.radial(r)) - f0) - (f(v1.radial(r)) - f0); };
    return radial_integral(g, {}, r_far, 1e-10);
}

double mu_order_constant(const ScalarPotential& v1, const ScalarPotential& v2) {
    require_radial(v1, "mu_order_constant");
    require_radial(v2, "mu_order_constant");
    const double r_far = std::max(scan_radius(v1), scan_radius(v2));
    if (r_far == 0.0) return 0.0;
    return radial_integral([&](double r) { return std::abs(v2.radial(r) - v1.radial(r)); }, {}, r_far, 1e-10);
}

}  // namespace reslab
