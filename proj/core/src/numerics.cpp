#include "reslab/numerics.hpp"

#include "reslab/errors.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

namespace reslab {

double smoothstep5(double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    return t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}

double cutoff_chi(double s) { return 1.0 - smoothstep5(s - 1.0); }

double PlateauCutoff::operator()(double x) const {
    if (x >= a && x <= b) return 1.0;
    if (w <= 0.0) return 0.0;
    if (x < a) return smoothstep5((x - (a - w)) / w);
    return 1.0 - smoothstep5((x - b) / w);
}

std::vector<double> linspace(double a, double b, std::size_t n) {
    std::vector<double> out(n);
    if (n == 1) {
        out[0] = a;
        return out;
    }
    for (std::size_t i = 0; i < n; ++i)
        out[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
    return out;
}

std::vector<double> logspace(double a, double b, std::size_t n) {
    auto out = linspace(std::log(a), std::log(b), n);
    for (auto& v : out) v = std::exp(v);
    if (n > 1) {
        out.front() = a;
        out.back() = b;
    }
    return out;
}

LinearFit fit_line(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw ConfigError("fit_line: need at least two paired samples");
    const double n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0) throw ConfigError("fit_line: abscissae are all equal");
    LinearFit fit;
    fit.n = x.size();
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - fit.intercept - fit.slope * x[i];
        fit.rss += r * r;
    }
    fit.r2 = syy > 0.0 ? 1.0 - fit.rss / syy : 1.0;
    return fit;
}

LinearFit fit_loglog(std::span<const double> x, std::span<const double> y) {
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] <= 0.0 || y[i] == 0.0 || !std::isfinite(y[i])) continue;
        lx.push_back(std::log(x[i]));
        ly.push_back(std::log(std::abs(y[i])));
    }
    return fit_line(lx, ly);
}

namespace {

using GK15 = boost::math::quadrature::gauss_kronrod<double, 15>;

// Single GK15 panel; the library reports the error of the rule on [-1, 1], so rescale it here.
QuadResult gk_panel(const std::function<double(double)>& f, double a, double b) {
    QuadResult p;
    p.value = GK15::integrate(f, a, b, 0, 0.0, &p.error, &p.l1);
    p.error *= 0.5 * std::abs(b - a);
    return p;
}

void bisect(const std::function<double(double)>& f, double a, double b, const QuadResult& whole, unsigned depth,
            double abs_tol, QuadResult& acc) {
    if (whole.error <= abs_tol || depth == 0) {
        acc.value += whole.value;
        acc.error += whole.error;
        acc.l1 += whole.l1;
        return;
    }
    const double mid = 0.5 * (a + b);
    bisect(f, a, mid, gk_panel(f, a, mid), depth - 1, 0.5 * abs_tol, acc);
    bisect(f, mid, b, gk_panel(f, mid, b), depth - 1, 0.5 * abs_tol, acc);
}

// Maps [a, +inf) onto [0, 1) with s = a + t / (1 - t).
struct Mapped {
    std::function<double(double)> g;
    double lo = 0.0, hi = 0.0;
};

Mapped map_interval(const std::function<double(double)>& f, double a, double b) {
    if (!std::isinf(b)) return {f, a, b};
    if (!std::isfinite(a) || b < 0) throw ConfigError("integrate: only [a, +inf) is supported");
    return {[f, a](double t) {
                const double u = 1.0 - t;
                return f(a + t / u) / (u * u);
            },
            0.0, 1.0};
}

}  // namespace

QuadResult integrate(const std::function<double(double)>& f, double a, double b, double rel_tol,
                     unsigned max_depth) {
    const double p[2] = {a, b};
    return integrate_panels(f, p, rel_tol, max_depth);
}

// The error budget rel_tol * (total L1) is shared equally among the panels.
QuadResult integrate_panels(const std::function<double(double)>& f, std::span<const double> pts,
                            double rel_tol, unsigned max_depth) {
    std::vector<Mapped> maps;
    std::vector<QuadResult> tops;
    double scale = 0.0;
    for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
        if (!(pts[k + 1] > pts[k])) continue;
        maps.push_back(map_interval(f, pts[k], pts[k + 1]));
        tops.push_back(gk_panel(maps.back().g, maps.back().lo, maps.back().hi));
        scale += std::max(tops.back().l1, std::abs(tops.back().value));
    }
    QuadResult total;
    if (maps.empty()) return total;
    const double share = rel_tol * scale / static_cast<double>(maps.size());
    for (std::size_t k = 0; k < maps.size(); ++k)
        bisect(maps[k].g, maps[k].lo, maps[k].hi, tops[k], max_depth, share, total);
    if (!std::isfinite(total.value)) throw NumericalError("integrate: non-finite quadrature result");
    return total;
}

namespace {
using GL20 = boost::math::quadrature::gauss<double, 20>;
}

cplx gauss_legendre(const std::function<cplx(double)>& f, double a, double b, std::size_t panels) {
    const auto& x = GL20::abscissa();
    const auto& w = GL20::weights();
    const double step = (b - a) / static_cast<double>(panels);
    cplx sum = 0.0;
    for (std::size_t p = 0; p < panels; ++p) {
        const double mid = a + (static_cast<double>(p) + 0.5) * step;
        const double half = 0.5 * step;
        cplx ps = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            ps += w[i] * (f(mid - half * x[i]) + f(mid + half * x[i]));
        }
        sum += ps * half;
    }
    return sum;
}

double gauss_legendre_real(const std::function<double(double)>& f, double a, double b,
                           std::size_t panels) {
    const auto& x = GL20::abscissa();
    const auto& w = GL20::weights();
    const double step = (b - a) / static_cast<double>(panels);
    double sum = 0.0;
    for (std::size_t p = 0; p < panels; ++p) {
        const double mid = a + (static_cast<double>(p) + 0.5) * step;
        const double half = 0.5 * step;
        double ps = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) ps += w[i] * (f(mid - half * x[i]) + f(mid + half * x[i]));
        sum += ps * half;
    }
    return sum;
}

std::vector<double> bracket_roots(const std::function<double(double)>& g, double a, double b,
                                  std::size_t n) {
    std::vector<double> roots;
    const auto xs = linspace(a, b, n);
    double x0 = xs[0], g0 = g(x0);
    if (g0 == 0.0) roots.push_back(x0);
    for (std::size_t i = 1; i < xs.size(); ++i) {
        const double x1 = xs[i], g1 = g(x1);
        if (g1 == 0.0) {
            roots.push_back(x1);
        } else if (g0 != 0.0 && (g0 < 0.0) != (g1 < 0.0)) {
            boost::uintmax_t iters = 200;
            auto tol = boost::math::tools::eps_tolerance<double>(52);
            auto br = boost::math::tools::toms748_solve(g, x0, x1, g0, g1, tol, iters);
            roots.push_back(0.5 * (br.first + br.second));
        }
        x0 = x1;
        g0 = g1;
    }
    return roots;
}

void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn) {
    if (threads <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::mutex mu;
    std::size_t failed_index = std::numeric_limits<std::size_t>::max();
    std::exception_ptr failure;
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(mu);
                if (i < failed_index) {
                    failed_index = i;
                    failure = std::current_exception();
                }
            }
        }
    };
    std::vector<std::jthread> pool;
    const unsigned n = std::min<unsigned>(threads, static_cast<unsigned>(count));
    for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);
    pool.clear();
    if (failure) std::rethrow_exception(failure);
}

}  // namespace reslab
