#include "reslab/symbols.hpp"

#include "reslab/bessel.hpp"
#include "reslab/errors.hpp"
#include "reslab/phasespace.hpp"

#include <cmath>
#include <numbers>

namespace reslab {

namespace {

constexpr cplx I(0.0, 1.0);

void check_sign(int sign) {
    if (sign != 1 && sign != -1) throw ConfigError("symbol sign must be +1 or -1");
}

// Shape of F[phi~+] without the constant.
cplx shape_plus(cplx xi) {
    if (xi == cplx(0.0)) throw SingularityError("symbol is singular at xi = 0");
    const cplx z = I * xi;
    return -std::exp(z) * bessel_k(2, z) / z;
}

cplx symbol_side_integral(int sign, double xi0, const std::function<cplx(double)>& a) {
    (void)sign;
    return gauss_legendre([&](double xi) { return a(xi) * std::exp(-0.5 * (xi - xi0) * (xi - xi0)); }, xi0 - 9.0,
                          xi0 + 9.0, 48);
}

cplx kernel_side_integral(int sign, double xi0) {
    // x = sign * u^2; phi~(x) dx = sign * phi~+(u^2) 2u du for both signs.
    auto f = [&](double u) {
        const double u2 = u * u;
        const double w = 16.0 * std::numbers::pi * u2 * (u2 + 1.0) * std::sqrt(u2 + 2.0);
        const double x = sign * u2;
        return sign * w * std::exp(-I * xi0 * x - 0.5 * x * x);
    };
    return gauss_legendre(f, 0.0, 6.0, 600);
}

}  // namespace

double phi_tilde(int sign, double x) {
    check_sign(sign);
    return sign > 0 ? kernel::phi_tilde_plus(x) : kernel::phi_tilde_minus(x);
}

cplx symbol_eval_complex(int sign, cplx xi, double C0) {
    check_sign(sign);
    if (sign > 0) return C0 * shape_plus(xi);
    return -C0 * shape_plus(-xi);
}

cplx symbol_eval(int sign, double xi, double C0) {
    if (xi == 0.0) throw SingularityError("symbol is singular at xi = 0");
    return symbol_eval_complex(sign, cplx(xi, 0.0), C0);
}

PairingSides pairing_oracle(int sign, double xi0, double C0) {
    check_sign(sign);
    if (std::abs(xi0) < 9.5) throw ConfigError("pairing oracle needs |xi0| >= 9.5 to stay clear of xi = 0");
    PairingSides p;
    p.xi0 = xi0;
    p.symbol_side = symbol_side_integral(sign, xi0, [&](double xi) { return symbol_eval(sign, xi, C0); });
    p.kernel_side = kernel_side_integral(sign, xi0);
    p.relative_difference = std::abs(p.symbol_side - p.kernel_side) / std::abs(p.kernel_side);
    return p;
}

cplx calibrate_symbol_constant(double xi0) {
    const cplx shape_side = symbol_side_integral(1, xi0, [](double xi) { return shape_plus(xi); });
    return kernel_side_integral(1, xi0) / shape_side;
}

cplx symbol_derivative(int sign, double xi, int N, int nodes) {
    if (N < 0) throw ConfigError("derivative order must be nonnegative");
    const double rad = 0.5 * (1.0 + std::abs(xi));
    if (rad >= std::abs(xi)) throw DomainError("Cauchy circle would enclose the singularity at 0");
    double fact = 1.0;
    for (int k = 2; k <= N; ++k) fact *= k;
    cplx acc = 0.0;
    for (int j = 0; j < nodes; ++j) {
        const cplx e = std::polar(1.0, 2.0 * std::numbers::pi * j / nodes);
        acc += symbol_eval_complex(sign, xi + rad * e) / std::pow(e, N);
    }
    return fact * acc / (static_cast<double>(nodes) * std::pow(rad, N));
}

SymbolCertificate decay_and_ellipticity(int sign, const std::vector<double>& xi_samples) {
    check_sign(sign);
    if (xi_samples.size() < 5) throw ConfigError("decay_and_ellipticity: at least 5 samples are required");
    double lo = std::abs(xi_samples.front()), hi = lo;
    for (double x : xi_samples) {
        if (x == 0.0) throw ConfigError("decay_and_ellipticity: xi = 0 is not admissible");
        lo = std::min(lo, std::abs(x));
        hi = std::max(hi, std::abs(x));
    }
    if (hi < 100.0 * lo) throw ConfigError("decay_and_ellipticity: samples must span two decades");
    SymbolCertificate c;
    c.sign = sign;
    c.validity_radius = lo;
    std::vector<double> ax;
    for (double x : xi_samples) {
        c.xi.push_back(x);
        c.abs_a.push_back(std::abs(symbol_eval(sign, x)));
        ax.push_back(std::abs(x));
    }
    const auto fit = fit_loglog(ax, c.abs_a);
    c.fit_slope = fit.slope;
    c.fit_r2 = fit.r2;
    c.order_pass = std::abs(fit.slope - c.order_claimed) <= 0.05;
    c.ellipticity_floor = std::numeric_limits<double>::infinity();
    c.observed_floor = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < ax.size(); ++i) {
        const double w = std::pow(1.0 + ax[i], 2.5);
        c.ellipticity_floor = std::min(c.ellipticity_floor, c.abs_a[i] * w);
        c.upper_constant = std::max(c.upper_constant, c.abs_a[i] * w);
        const double wo = std::pow(1.0 + ax[i], -fit.slope);
        c.observed_floor = std::min(c.observed_floor, c.abs_a[i] * wo);
        c.observed_upper = std::max(c.observed_upper, c.abs_a[i] * wo);
        c.residuals.push_back(std::log(c.abs_a[i]) - fit.intercept - fit.slope * std::log(ax[i]));
    }
    c.floor_pass = c.ellipticity_floor >= 1e-6;
    for (int N = 1; N <= 2; ++N) {
        std::vector<double> rc, rf;
        double fact = N == 1 ? 1.0 : 2.0;
        double cmax = 0.0;
        for (std::size_t i = 0; i < ax.size(); ++i) {
            const double d = std::abs(symbol_derivative(sign, c.xi[i], N));
            const double base = std::pow(2.0, N + 1) * fact;
            rc.push_back(d / (base * std::pow(1.0 + ax[i], c.order_claimed - N)));
            rf.push_back(d / (base * std::pow(1.0 + ax[i], fit.slope - N)));
            cmax = std::max(cmax, rf.back());
        }
        c.derivative_slope_claimed[N - 1] = fit_loglog(ax, rc).slope;
        c.derivative_slope_fitted[N - 1] = fit_loglog(ax, rf).slope;
        c.derivative_constant_fitted[N - 1] = cmax;
    }
    return c;
}

nlohmann::json SymbolCertificate::to_json() const {
    return {{"sign", sign},
            {"order", order_claimed},
            {"fit_slope", fit_slope},
            {"fit_r2", fit_r2},
            {"order_pass", order_pass},
            {"floor", ellipticity_floor},
            {"upper_constant", upper_constant},
            {"floor_pass", floor_pass},
            {"observed_floor", observed_floor},
            {"observed_upper", observed_upper},
            {"validity_radius", validity_radius},
            {"derivative_growth_slope_claimed_order", {derivative_slope_claimed[0], derivative_slope_claimed[1]}},
            {"derivative_growth_slope_fitted_order", {derivative_slope_fitted[0], derivative_slope_fitted[1]}},
            {"derivative_constant_fitted_order", {derivative_constant_fitted[0], derivative_constant_fitted[1]}},
            {"residuals", residuals}};
}

}  // namespace reslab
