#include "reslab/dirac.hpp"

#include "reslab/errors.hpp"

#include <lapacke.h>

#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace reslab {

using nlohmann::json;

double DistortionMap::max_modulus(double epsilon) { return epsilon / std::sqrt(1.0 + epsilon * epsilon); }

void DistortionMap::validate() const {
    if (!std::isfinite(theta.real()) || !std::isfinite(theta.imag())) throw DomainError("non-finite distortion");
    if (theta.imag() < 0.0) throw DomainError("distortion parameter must satisfy Im theta >= 0");
    if (std::abs(theta) > max_modulus(sector_epsilon) + 1e-15) {
        std::ostringstream os;
        os << "|theta| = " << std::abs(theta) << " exceeds the sector bound " << max_modulus(sector_epsilon);
        throw DomainError(os.str());
    }
}

namespace {

cplx branch_point(double t, cplx s, bool plus) {
    const cplx c = std::sqrt(t * t / (s * s) + 1.0);
    return plus ? c : -c;
}

double rect_distance(const ComplexRect& w, cplx z) {
    const double dx = std::max({w.re_lo - z.real(), 0.0, z.real() - w.re_hi});
    const double dy = std::max({w.im_lo - z.imag(), 0.0, z.imag() - w.im_hi});
    return std::hypot(dx, dy);
}

// Minimize g(t) over t >= 0 on [0, tmax] by sampling and a local Brent refinement.
double minimize_on_curve(const std::function<double(double)>& g, double tmax, std::size_t samples) {
    double best_t = 0.0, best = g(0.0);
    const double dt = tmax / static_cast<double>(samples);
    for (std::size_t k = 1; k <= samples; ++k) {
        const double t = dt * static_cast<double>(k);
        const double v = g(t);
        if (v < best) {
            best = v;
            best_t = t;
        }
    }
    const auto r = boost::math::tools::brent_find_minima(g, std::max(0.0, best_t - dt), best_t + dt, 50);
    return std::min(best, r.second);
}

}  // namespace

std::vector<CurvePoint> essential_curve(cplx theta, const std::vector<double>& lambda_grid) {
    const cplx s = 1.0 + theta;
    if (std::abs(s) == 0.0) throw DomainError("1 + theta must be nonzero");
    std::vector<CurvePoint> out;
    out.reserve(lambda_grid.size());
    for (double l : lambda_grid) {
        if (l < 0.0) throw DomainError("curve parameter must be nonnegative");
        const cplx c = std::sqrt(l / (s * s) + 1.0);
        out.push_back({l, c, -c});
    }
    return out;
}

double distance_to_curve(cplx z, cplx theta) {
    const cplx s = 1.0 + theta;
    const bool plus = z.real() >= 0.0;
    const double tmax = 2.0 * (std::abs(z) + 2.0) * std::abs(s);
    return minimize_on_curve([&](double t) { return std::abs(z - branch_point(t, s, plus)); }, tmax, 4000);
}

bool uncovered_by(cplx z, cplx theta) {
    const cplx s = 1.0 + theta;
    const double top = std::arg(s * s);
    if (!(top > 0.0)) return false;
    const double a = std::arg((z * z - 1.0) * s * s);
    return a > 0.0 && a <= top + 1e-12 && std::abs(z.real()) > 1.0;
}

json ComplexRect::to_json() const { return {{"re", {re_lo, re_hi}}, {"im", {im_lo, im_hi}}}; }

double window_clearance(const ComplexRect& w, cplx theta) {
    const cplx s = 1.0 + theta;
    const double reach = std::max(std::abs(w.re_lo), std::abs(w.re_hi)) + std::abs(w.im_lo) + std::abs(w.im_hi);
    const double tmax = 2.0 * (reach + 2.0) * std::abs(s);
    double d = std::numeric_limits<double>::infinity();
    for (bool plus : {true, false}) {
        if (plus && w.re_hi < 0.0) continue;
        if (!plus && w.re_lo > 0.0) continue;
        const double dt = tmax / 20000.0;
        for (int k = 0; k <= 20000; ++k) {
            const cplx c = branch_point(dt * k, s, plus);
            if (c.real() >= w.re_lo && c.real() <= w.re_hi && c.imag() >= w.im_lo && c.imag() <= w.im_hi)
                return -1.0;
        }
        d = std::min(d, minimize_on_curve([&](double t) { return rect_distance(w, branch_point(t, s, plus)); },
                                          tmax, 20000));
    }
    return d;
}

cplx DistortedChannelMatrix::at(std::size_t i, std::size_t j) const {
    const long d = static_cast<long>(j) - static_cast<long>(i);
    if (d < -bandwidth || d > bandwidth) return 0.0;
    return band[i][static_cast<std::size_t>(d + bandwidth)];
}

std::vector<cplx> DistortedChannelMatrix::dense_row_major() const {
    const std::size_t n = dim();
    std::vector<cplx> a(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (int d = -bandwidth; d <= bandwidth; ++d) {
            const long j = static_cast<long>(i) + d;
            if (j >= 0 && j < static_cast<long>(n)) a[i * n + static_cast<std::size_t>(j)] = band[i][d + bandwidth];
        }
    return a;
}

namespace {

double band_residual(const DistortedChannelMatrix& m, bool conjugate) {
    double num = 0.0, den = 0.0;
    const std::size_t n = m.dim();
    for (std::size_t i = 0; i < n; ++i)
        for (int d = -m.bandwidth; d <= m.bandwidth; ++d) {
            const long j = static_cast<long>(i) + d;
            if (j < 0 || j >= static_cast<long>(n)) continue;
            const cplx a = m.at(i, static_cast<std::size_t>(j));
            const cplx b = m.at(static_cast<std::size_t>(j), i);
            num = std::max(num, std::abs(a - (conjugate ? std::conj(b) : b)));
            den = std::max(den, std::abs(a));
        }
    return den > 0.0 ? num / den : 0.0;
}

}  // namespace

double DistortedChannelMatrix::symmetry_residual() const { return band_residual(*this, false); }
double DistortedChannelMatrix::hermitian_residual() const { return band_residual(*this, true); }

std::vector<double> DistortedChannelMatrix::upper_grid() const {
    std::vector<double> r(points);
    for (std::size_t i = 0; i < points; ++i) r[i] = h * static_cast<double>(i + 1);
    return r;
}

double max_step(double hbar, double points_per_wavelength) {
    return 2.0 * std::numbers::pi * hbar / (std::sqrt(3.0) * points_per_wavelength);
}

ChannelSamples sample_channel_potential(const ScalarPotential& v, cplx theta, double h, double r_max) {
    if (!(h > 0.0) || !(r_max > 0.0)) throw ConfigError("grid step and outer radius must be positive");
    if (!v.is_radial()) throw DomainError("channel reduction requires a radial potential");
    DistortionMap{theta, v.meta().epsilon}.validate();
    const auto N = static_cast<std::size_t>(std::llround(r_max / h));
    if (N < 4) throw RefinementRequired("fewer than four radial points");
    if (2 * N > 8000) throw ConfigError("channel matrix exceeds the dense size limit");
    const cplx s = 1.0 + theta;
    auto pot = [&](double r) -> cplx {
        if (theta == 0.0) return v.radial(r);
        auto val = v.complex_radial(s * r);
        if (!val) throw DomainError("potential has no analytic continuation for the distortion");
        return *val;
    };
    ChannelSamples out;
    out.theta = theta;
    out.h = h;
    out.upper.resize(N);
    out.lower.resize(N);
    for (std::size_t j = 0; j < N; ++j) {
        out.upper[j] = pot(h * static_cast<double>(j + 1));
        out.lower[j] = pot(h * (static_cast<double>(j) + 0.5));
    }
    return out;
}

DistortedChannelMatrix assemble_channel(const ScalarPotential& v, int kappa, double hbar, cplx theta, double h,
                                        double r_max, double points_per_wavelength) {
    if (kappa == 0) throw ConfigError("kappa must be a nonzero integer");
    if (!(hbar > 0.0)) throw ConfigError("hbar must be positive");
    return assemble_channel(sample_channel_potential(v, theta, h, r_max), kappa, hbar, points_per_wavelength);
}

DistortedChannelMatrix assemble_channel(const ChannelSamples& samples, int kappa, double hbar,
                                        double points_per_wavelength) {
    if (kappa == 0) throw ConfigError("kappa must be a nonzero integer");
    if (!(hbar > 0.0)) throw ConfigError("hbar must be positive");
    const double h = samples.h;
    const cplx theta = samples.theta;
    if (h > max_step(hbar, points_per_wavelength) * (1.0 + 1e-12)) {
        std::ostringstream os;
        os << "grid step " << h << " under-resolves hbar = " << hbar << " (limit " << max_step(hbar, points_per_wavelength)
           << ")";
        throw RefinementRequired(os.str());
    }
    const std::size_t N = samples.upper.size();
    const cplx s = 1.0 + theta;
    DistortedChannelMatrix m;
    m.kappa = kappa;
    m.hbar = hbar;
    m.theta = theta;
    m.h = h;
    m.r_max = h * static_cast<double>(N);
    m.points = N;
    m.band.assign(2 * N, {});
    auto add = [&](std::size_t i, std::size_t j, cplx val) {
        m.band[i][j + DistortedChannelMatrix::bandwidth - i] += val;
    };
    for (std::size_t j = 0; j < N; ++j) {
        add(2 * j + 1, 2 * j + 1, samples.upper[j] + 1.0);
        add(2 * j, 2 * j, samples.lower[j] - 1.0);
    }
    static constexpr double d4[4] = {1.0 / 24.0, -9.0 / 8.0, 9.0 / 8.0, -1.0 / 24.0};
    static constexpr double i4[4] = {-1.0 / 16.0, 9.0 / 16.0, 9.0 / 16.0, -1.0 / 16.0};
    for (std::size_t i = 0; i < N; ++i) {
        const double rG = h * (static_cast<double>(i) + 0.5);
        const bool interior = i >= 1 && i + 2 <= N;
        const int first = interior ? -2 : -1;
        const int count = interior ? 4 : 2;
        for (int k = 0; k < count; ++k) {
            const long j = static_cast<long>(i) + first + k;  // upper-component index
            if (j < 0 || j >= static_cast<long>(N)) continue;
            const double dc = interior ? d4[k] : (k == 0 ? -1.0 : 1.0);
            const double ic = interior ? i4[k] : 0.5;
            const cplx a = hbar * (dc / h + kappa / rG * ic) / s;
            const std::size_t row = 2 * i, col = 2 * static_cast<std::size_t>(j) + 1;
            add(row, col, a);
            add(col, row, a);
        }
    }
    return m;
}

std::vector<cplx> channel_eigenvalues(const DistortedChannelMatrix& m) {
    const auto n = static_cast<lapack_int>(m.dim());
    auto a = m.dense_row_major();
    std::vector<cplx> w(static_cast<std::size_t>(n));
    const lapack_int info =
        LAPACKE_zgeev(LAPACK_ROW_MAJOR, 'N', 'N', n, reinterpret_cast<lapack_complex_double*>(a.data()), n,
                      reinterpret_cast<lapack_complex_double*>(w.data()), nullptr, n, nullptr, n);
    if (info != 0) {
        std::ostringstream os;
        os << "eigensolver failed for kappa = " << m.kappa << " (info " << info << ")";
        throw NumericalError(os.str());
    }
    return w;
}

namespace {

std::vector<cplx> band_matvec(const DistortedChannelMatrix& m, const std::vector<cplx>& x) {
    const std::size_t n = m.dim();
    std::vector<cplx> y(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (int d = -m.bandwidth; d <= m.bandwidth; ++d) {
            const long j = static_cast<long>(i) + d;
            if (j >= 0 && j < static_cast<long>(n)) y[i] += m.band[i][d + m.bandwidth] * x[static_cast<std::size_t>(j)];
        }
    return y;
}

}  // namespace

cplx refine_eigenvalue(const DistortedChannelMatrix& m, cplx z0, int max_iter) {
    const auto n = static_cast<lapack_int>(m.dim());
    constexpr int kl = DistortedChannelMatrix::bandwidth, ku = DistortedChannelMatrix::bandwidth;
    constexpr int ldab = 2 * kl + ku + 1;
    std::vector<cplx> u(static_cast<std::size_t>(n));
    for (lapack_int i = 0; i < n; ++i) u[static_cast<std::size_t>(i)] = cplx(1.0, 0.1 * std::sin(0.37 * i));
    std::vector<cplx> ab(static_cast<std::size_t>(ldab) * static_cast<std::size_t>(n));
    std::vector<lapack_int> ipiv(static_cast<std::size_t>(n));
    cplx sigma = z0;
    for (int it = 0; it < max_iter; ++it) {
        std::fill(ab.begin(), ab.end(), cplx(0.0));
        for (lapack_int i = 0; i < n; ++i)
            for (int d = -kl; d <= ku; ++d) {
                const lapack_int j = i + d;
                if (j < 0 || j >= n) continue;
                cplx val = m.band[static_cast<std::size_t>(i)][d + kl];
                if (d == 0) val -= sigma;
                ab[static_cast<std::size_t>(kl + ku + i - j + j * ldab)] = val;
            }
        lapack_int info = LAPACKE_zgbtrf(LAPACK_COL_MAJOR, n, n, kl, ku,
                                         reinterpret_cast<lapack_complex_double*>(ab.data()), ldab, ipiv.data());
        if (info > 0) return sigma;  // shift is an eigenvalue to working precision
        if (info < 0) throw NumericalError("banded factorization failed");
        info = LAPACKE_zgbtrs(LAPACK_COL_MAJOR, 'N', n, kl, ku, 1, reinterpret_cast<lapack_complex_double*>(ab.data()),
                              ldab, ipiv.data(), reinterpret_cast<lapack_complex_double*>(u.data()), n);
        if (info != 0) throw NumericalError("banded solve failed");
        double nrm = 0.0;
        for (const auto& x : u) nrm = std::max(nrm, std::abs(x));
        for (auto& x : u) x /= nrm;
        if (it < 2) continue;  // lock onto the eigenvector nearest z0 before moving the shift
        const auto mu = band_matvec(m, u);
        cplx num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i) {
            num += u[i] * mu[i];
            den += u[i] * u[i];
        }
        const cplx next = num / den;
        const bool done = std::abs(next - sigma) < 1e-14 * std::max(1.0, std::abs(sigma));
        sigma = next;
        if (done) return sigma;
    }
    return sigma;
}

std::vector<double> channel_eigenvalues_real(const DistortedChannelMatrix& m, double lo, double hi) {
    if (m.theta != 0.0) throw DomainError("real eigensolver requires theta = 0");
    if (m.hermitian_residual() > 1e-12) throw DomainError("channel matrix is not self-adjoint");
    const auto n = static_cast<lapack_int>(m.dim());
    constexpr lapack_int kd = DistortedChannelMatrix::bandwidth;
    // Upper band storage, column major: ab[kd + i - j + j * ldab] = M(i, j) for i <= j.
    std::vector<double> ab(static_cast<std::size_t>((kd + 1) * n), 0.0);
    for (lapack_int j = 0; j < n; ++j)
        for (lapack_int i = std::max<lapack_int>(0, j - kd); i <= j; ++i)
            ab[static_cast<std::size_t>(kd + i - j + j * (kd + 1))] =
                m.at(static_cast<std::size_t>(i), static_cast<std::size_t>(j)).real();
    std::vector<double> w(static_cast<std::size_t>(n));
    std::vector<lapack_int> ifail(static_cast<std::size_t>(n));
    lapack_int found = 0;
    const lapack_int info = LAPACKE_dsbevx(LAPACK_COL_MAJOR, 'N', 'V', 'U', n, kd, ab.data(), kd + 1, nullptr, 1, lo,
                                           hi, 0, 0, 2.0 * LAPACKE_dlamch('S'), &found, w.data(), nullptr, 1,
                                           ifail.data());
    if (info != 0) {
        std::ostringstream os;
        os << "symmetric band eigensolver failed for kappa = " << m.kappa << " (info " << info << ")";
        throw NumericalError(os.str());
    }
    w.resize(static_cast<std::size_t>(found));
    return w;
}

int ResonanceSet::count() const {
    int n = 0;
    for (const auto& e : entries)
        if (e.certified) n += e.multiplicity;
    return n;
}

json ResonanceSet::to_json() const {
    json es = json::array();
    for (const auto& e : entries) {
        es.push_back({{"z_re", e.z.real()},
                      {"z_im", e.z.imag()},
                      {"mult", e.multiplicity},
                      {"algebraic_multiplicity", e.algebraic},
                      {"kappa", e.kappa},
                      {"stability_gap", e.stability_gap},
                      {"grid_shift", e.grid_shift},
                      {"rmax_shift", e.rmax_shift},
                      {"curve_distance", e.curve_distance},
                      {"certified", e.certified}});
    }
    json fails = json::array();
    for (const auto& f : failures) fails.push_back({{"kappa", f.kappa}, {"message", f.message}});
    return {{"entries", es},
            {"window", window.to_json()},
            {"theta_pair",
             {{{"re", theta_pair[0].real()}, {"im", theta_pair[0].imag()}},
              {{"re", theta_pair[1].real()}, {"im", theta_pair[1].imag()}}}},
            {"kappa_max", kappa_max},
            {"hbar", hbar},
            {"grid", {{"h", h}, {"r_max", r_max}}},
            {"domain_certificate", {{"window_clearance", window_clearance}, {"admissible", window_admissible}}},
            {"candidates", candidates},
            {"count", count()},
            {"partial", partial()},
            {"failures", fails}};
}

std::string ResonanceSet::to_csv() const {
    std::ostringstream os;
    os.precision(17);
    os << "z_re,z_im,mult,kappa,stability_gap,grid_shift,rmax_shift,certified\n";
    for (const auto& e : entries)
        os << e.z.real() << ',' << e.z.imag() << ',' << e.multiplicity << ',' << e.kappa << ',' << e.stability_gap << ','
           << e.grid_shift << ',' << e.rmax_shift << ',' << (e.certified ? 1 : 0) << '\n';
    return os.str();
}

std::pair<double, double> resolve_grid(const ScalarPotential& v, double hbar, const ComplexRect& window,
                                       const std::array<cplx, 2>& theta_pair, const GridSpec& spec) {
    double r_max = spec.r_max;
    if (!(r_max > 0.0)) {
        const double sup = v.sup_abs();
        const double core = sup > 0.0 ? v.radius_below(spec.core_level * sup) : 0.0;
        const double re_min = std::min(std::abs(window.re_lo), std::abs(window.re_hi));
        const double k_min = std::sqrt(std::max(re_min * re_min - 1.0, 1e-6)) / hbar;
        const double im_theta = std::min(theta_pair[0].imag(), theta_pair[1].imag());
        const double tail = im_theta > 0.0 ? spec.absorb_decades * std::log(10.0) / (k_min * im_theta)
                                           : std::numeric_limits<double>::infinity();
        r_max = std::min(core + tail, spec.r_max_cap);
    }
    const double hmax = spec.h > 0.0 ? spec.h : max_step(hbar, spec.points_per_wavelength);
    const auto N = static_cast<std::size_t>(std::ceil(r_max / hmax - 1e-9));
    return {r_max / static_cast<double>(N), r_max};
}

namespace {

struct ChannelOutcome {
    std::vector<ResonanceEntry> entries;
    std::size_t candidates = 0;
    bool failed = false;
    std::string message;
};

struct SampleBundle {
    ChannelSamples first, second, fine, wide;
};

ChannelOutcome solve_channel(const SampleBundle& b, int kappa, double hbar, const ComplexRect& window,
                             const ResonanceOptions& opt) {
    ChannelOutcome out;
    const double ppw = opt.grid.points_per_wavelength;
    const cplx t1 = b.first.theta, t2 = b.second.theta;
    const auto m1 = assemble_channel(b.first, kappa, hbar, ppw);
    const auto m2 = assemble_channel(b.second, kappa, hbar, ppw);
    const auto e1 = channel_eigenvalues(m1);
    const auto e2 = channel_eigenvalues(m2);
    std::vector<ResonanceEntry> stable;
    for (const cplx z : e1) {
        if (!window.contains(z)) continue;
        ++out.candidates;
        if (!uncovered_by(z, t1)) continue;
        double gap = std::numeric_limits<double>::infinity();
        cplx z2 = z;
        for (const cplx w : e2)
            if (std::abs(w - z) < gap) {
                gap = std::abs(w - z);
                z2 = w;
            }
        if (gap > opt.stability_gap || !uncovered_by(z2, t2)) continue;
        const double dist = std::min(distance_to_curve(z, t1), distance_to_curve(z2, t2));
        if (dist < opt.curve_margin) continue;
        ResonanceEntry e;
        e.z = z;
        e.kappa = kappa;
        e.theta_pair = {t1, t2};
        e.stability_gap = gap;
        e.curve_distance = dist;
        stable.push_back(e);
    }
    std::sort(stable.begin(), stable.end(), [](const ResonanceEntry& a, const ResonanceEntry& b) {
        return a.z.real() != b.z.real() ? a.z.real() < b.z.real() : a.z.imag() < b.z.imag();
    });
    std::vector<bool> used(stable.size(), false);
    for (std::size_t i = 0; i < stable.size(); ++i) {
        if (used[i]) continue;
        ResonanceEntry e = stable[i];
        for (std::size_t j = i + 1; j < stable.size(); ++j)
            if (!used[j] && std::abs(stable[j].z - e.z) <= opt.cluster_tol) {
                used[j] = true;
                ++e.algebraic;
                e.stability_gap = std::max(e.stability_gap, stable[j].stability_gap);
            }
        e.multiplicity = 2 * std::abs(kappa) * e.algebraic;
        out.entries.push_back(e);
    }
    if (opt.certify && !out.entries.empty()) {
        const auto fine = assemble_channel(b.fine, kappa, hbar, ppw);
        const auto wide = assemble_channel(b.wide, kappa, hbar, ppw);
        for (auto& e : out.entries) {
            e.grid_shift = std::abs(refine_eigenvalue(fine, e.z) - e.z);
            e.rmax_shift = std::abs(refine_eigenvalue(wide, e.z) - e.z);
            e.certified = e.grid_shift <= opt.certify_tol && e.rmax_shift <= opt.certify_tol;
        }
    } else {
        for (auto& e : out.entries) e.certified = true;
    }
    return out;
}

}  // namespace

ResonanceSet resonances(const ScalarPotential& v, double hbar, cplx theta1, cplx theta2, const ComplexRect& window,
                        int kappa_max, const ResonanceOptions& opt) {
    if (!(hbar > 0.0)) throw ConfigError("hbar must be positive");
    if (kappa_max < 1) throw ConfigError("kappa_max must be at least 1");
    if (theta1 == theta2) throw ConfigError("the distortion pair must consist of distinct values");
    DistortionMap{theta1, v.meta().epsilon}.validate();
    DistortionMap{theta2, v.meta().epsilon}.validate();
    if (!(window.re_hi > window.re_lo) || !(window.im_hi > window.im_lo))
        throw ConfigError("window must be a nondegenerate rectangle");
    if (!(window.re_lo > 1.0 || window.re_hi < -1.0)) throw ConfigError("window must lie in |Re z| > 1");

    ResonanceSet set;
    set.window = window;
    set.theta_pair = {theta1, theta2};
    set.kappa_max = kappa_max;
    set.hbar = hbar;
    std::tie(set.h, set.r_max) = resolve_grid(v, hbar, window, set.theta_pair, opt.grid);
    set.window_clearance = std::min(window_clearance(window, theta1), window_clearance(window, theta2));
    set.window_admissible = set.window_clearance > 0.0;

    std::vector<int> kappas;
    for (int k = 1; k <= kappa_max; ++k) {
        kappas.push_back(-k);
        kappas.push_back(k);
    }
    SampleBundle bundle{sample_channel_potential(v, theta1, set.h, set.r_max),
                        sample_channel_potential(v, theta2, set.h, set.r_max), {}, {}};
    if (opt.certify) {
        bundle.fine = sample_channel_potential(v, theta1, 0.5 * set.h, set.r_max);
        bundle.wide = sample_channel_potential(v, theta1, set.h, 1.25 * set.r_max);
    }
    std::vector<ChannelOutcome> outcomes(kappas.size());
    parallel_for(kappas.size(), opt.threads, [&](std::size_t i) {
        try {
            outcomes[i] = solve_channel(bundle, kappas[i], hbar, window, opt);
        } catch (const RefinementRequired&) {
            throw;
        } catch (const NumericalError& e) {
            outcomes[i].failed = true;
            outcomes[i].message = e.what();
        }
    });
    for (std::size_t i = 0; i < kappas.size(); ++i) {
        if (outcomes[i].failed) set.failures.push_back({kappas[i], outcomes[i].message});
        set.candidates += outcomes[i].candidates;
        for (auto& e : outcomes[i].entries) set.entries.push_back(e);
    }
    return set;
}

int kappa_max_rule(double c, double hbar) {
    if (!(c > 0.0) || !(hbar > 0.0)) throw ConfigError("kappa rule needs positive c and hbar");
    return static_cast<int>(std::ceil(c / hbar - 1e-12));
}

ScalingTable count_scaling(const ScalarPotential& v, const std::vector<double>& hbar_list, const ComplexRect& window,
                           cplx theta1, cplx theta2, double kappa_c, const ResonanceOptions& opt) {
    if (hbar_list.size() < 2) throw ConfigError("scaling needs at least two hbar values");
    for (std::size_t i = 1; i < hbar_list.size(); ++i)
        if (!(hbar_list[i] < hbar_list[i - 1])) throw ConfigError("hbar list must be decreasing");
    ScalingTable t;
    for (double hb : hbar_list) {
        const auto start = std::chrono::steady_clock::now();
        ScalingRow row;
        row.hbar = hb;
        row.kappa_max = kappa_max_rule(kappa_c, hb);
        auto set = resonances(v, hb, theta1, theta2, window, row.kappa_max, opt);
        row.count = set.count();
        row.partial = set.partial();
        row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        t.rows.push_back(row);
        t.sets.push_back(std::move(set));
    }
    std::vector<double> x, y;
    for (const auto& r : t.rows)
        if (r.count > 0) {
            x.push_back(std::log(1.0 / r.hbar));
            y.push_back(std::log(static_cast<double>(r.count)));
        }
    if (x.size() >= 2) {
        const auto fit = fit_line(x, y);
        t.slope = fit.slope;
        t.intercept = fit.intercept;
    } else {
        t.slope = std::numeric_limits<double>::quiet_NaN();
    }
    const auto& a = t.rows[t.rows.size() - 2];
    const auto& b = t.rows.back();
    t.halving_ratio = a.count > 0 ? static_cast<double>(b.count) / a.count : std::numeric_limits<double>::quiet_NaN();
    return t;
}

json ScalingTable::to_json() const {
    auto num = [](double x) -> json { return std::isfinite(x) ? json(x) : json(nullptr); };
    json rs = json::array();
    for (const auto& r : rows)
        rs.push_back({{"hbar", r.hbar}, {"kappa_max", r.kappa_max}, {"count", r.count}, {"partial", r.partial}});
    return {{"rows", rs}, {"slope", num(slope)}, {"intercept", num(intercept)}, {"halving_ratio", num(halving_ratio)}};
}

std::string ScalingTable::to_csv() const {
    std::ostringstream os;
    os.precision(17);
    os << "hbar,kappa_max,count,partial\n";
    for (const auto& r : rows) os << r.hbar << ',' << r.kappa_max << ',' << r.count << ',' << (r.partial ? 1 : 0) << '\n';
    return os.str();
}

}  // namespace reslab
