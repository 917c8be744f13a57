#include "reslab/bessel.hpp"

#include "reslab/errors.hpp"

#include <cmath>
#include <numbers>

namespace reslab {

namespace {

using ld = long double;
using cld = std::complex<long double>;

constexpr ld kEulerGamma = 0.577215664901532860606512090082402431L;
constexpr double kSeriesRadius = 8.0;
constexpr double kAsymptoticRadius = 12.0;
constexpr double kMaxArg = 0.8 * std::numbers::pi;

void check_args(int nu, cplx z) {
    if (nu < 0 || nu > 2) throw DomainError("bessel_k: order must be 0, 1 or 2");
    if (z == cplx(0.0, 0.0)) throw SingularityError("bessel_k: K_nu is singular at z = 0");
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) throw DomainError("bessel_k: non-finite argument");
}

}  // namespace

std::string to_string(BesselBranch b) {
    switch (b) {
        case BesselBranch::series: return "series";
        case BesselBranch::continued_fraction: return "continued_fraction";
        case BesselBranch::asymptotic: return "asymptotic";
    }
    return "unknown";
}

cplx bessel_k_series(int nu, cplx zd) {
    check_args(nu, zd);
    const cld z(zd.real(), zd.imag());
    const cld half = z / 2.0L;
    const cld q = half * half;
    const int n = nu;

    ld fact_n = 1.0L;
    for (int j = 2; j <= n; ++j) fact_n *= j;

    // Finite part: 1/2 (z/2)^-n sum_{k<n} (n-k-1)!/k! (-q)^k
    cld finite = 0.0L;
    if (n > 0) {
        cld qk = 1.0L;
        for (int k = 0; k < n; ++k) {
            ld num = 1.0L, den = 1.0L;
            for (int j = 2; j <= n - k - 1; ++j) num *= j;
            for (int j = 2; j <= k; ++j) den *= j;
            finite += (num / den) * qk;
            qk *= -q;
        }
        finite *= 0.5L * std::pow(half, static_cast<ld>(-n));
    }

    // I_n and the digamma-weighted series, summed together.
    cld term = 1.0L / fact_n;  // q^k / (k! (n+k)!)
    ld psi_k = -kEulerGamma;   // psi(k+1)
    ld psi_nk = -kEulerGamma;  // psi(n+k+1)
    for (int j = 1; j <= n; ++j) psi_nk += 1.0L / j;
    cld sum_i = 0.0L, sum_psi = 0.0L;
    for (int k = 0; k < 400; ++k) {
        sum_i += term;
        sum_psi += (psi_k + psi_nk) * term;
        const ld mag = std::abs(term);
        if (k > std::abs(z) && mag < 1e-22L * std::abs(sum_i) && mag * std::abs(psi_k + psi_nk) < 1e-22L * std::abs(sum_psi))
            break;
        term *= q / (static_cast<ld>(k + 1) * static_cast<ld>(n + k + 1));
        psi_k += 1.0L / (k + 1);
        psi_nk += 1.0L / (n + k + 1);
    }
    const cld zn = std::pow(half, static_cast<ld>(n));
    const cld i_n = zn * sum_i;
    const ld sgn = (n % 2 == 0) ? 1.0L : -1.0L;
    const cld result = finite - sgn * std::log(half) * i_n + sgn * 0.5L * zn * sum_psi;
    return {static_cast<double>(result.real()), static_cast<double>(result.imag())};
}

cplx bessel_k_continued_fraction(int nu, cplx z) {
    check_args(nu, z);
    if (std::abs(std::arg(z)) > kMaxArg) throw DomainError("bessel_k: argument too close to the branch cut");
    if (std::abs(z) < 2.0) throw DomainError("bessel_k: continued fraction needs |z| >= 2");
    cplx b = 2.0 * (1.0 + z);
    cplx d = 1.0 / b;
    cplx h = d, delh = d;
    cplx q1 = 0.0, q2 = 1.0;
    const double a1 = 0.25;
    cplx q = a1, c = a1;
    double a = -a1;
    cplx s = 1.0 + q * delh;
    bool converged = false;
    for (int i = 1; i < 5000; ++i) {
        a -= 2 * i;
        c = -a * c / (i + 1.0);
        const cplx qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh = (b * d - 1.0) * delh;
        h += delh;
        const cplx dels = q * delh;
        s += dels;
        if (std::abs(dels / s) < 1e-17) {
            converged = true;
            break;
        }
    }
    if (!converged) throw NumericalError("bessel_k: continued fraction did not converge");
    h = a1 * h;
    const cplx k0 = std::sqrt(std::numbers::pi / (2.0 * z)) * std::exp(-z) / s;
    if (nu == 0) return k0;
    const cplx k1 = k0 * (z + 0.5 - h) / z;
    if (nu == 1) return k1;
    return k0 + 2.0 / z * k1;
}

cplx bessel_k_asymptotic(int nu, cplx z, int* terms_used) {
    check_args(nu, z);
    if (std::abs(std::arg(z)) > kMaxArg) throw DomainError("bessel_k: argument too close to the branch cut");
    const double mu = 4.0 * nu * nu;
    cplx term = 1.0, sum = 1.0;
    double prev = 1.0;
    int k = 1;
    for (; k < 200; ++k) {
        const double odd = 2.0 * k - 1.0;
        const cplx next = term * (mu - odd * odd) / (8.0 * k * z);
        if (std::abs(next) > prev || next == cplx(0.0)) break;
        term = next;
        sum += term;
        prev = std::abs(term);
        if (prev < 1e-18 * std::abs(sum)) break;
    }
    if (terms_used) *terms_used = k;
    return std::sqrt(std::numbers::pi / (2.0 * z)) * std::exp(-z) * sum;
}

BesselBranch BesselEvaluator::branch(cplx z) const {
    const double r = std::abs(z);
    if (r <= series_radius) return BesselBranch::series;
    if (r < asymptotic_radius) return BesselBranch::continued_fraction;
    return BesselBranch::asymptotic;
}

cplx BesselEvaluator::operator()(cplx z) const {
    switch (branch(z)) {
        case BesselBranch::series: return bessel_k_series(nu, z);
        case BesselBranch::continued_fraction: return bessel_k_continued_fraction(nu, z);
        case BesselBranch::asymptotic: return bessel_k_asymptotic(nu, z);
    }
    return {};
}

cplx bessel_k(int nu, cplx z) {
    BesselEvaluator ev;
    ev.nu = nu;
    ev.series_radius = kSeriesRadius;
    ev.asymptotic_radius = kAsymptoticRadius;
    return ev(z);
}

double BesselEvaluator::recurrence_residual(cplx z) {
    const double rad = std::min(0.25, 0.1 * std::abs(z));
    constexpr int kNodes = 64;
    cplx deriv = 0.0;
    for (int j = 0; j < kNodes; ++j) {
        const cplx e = std::polar(1.0, 2.0 * std::numbers::pi * j / kNodes);
        deriv += bessel_k(1, z + rad * e) / e;
    }
    deriv /= (kNodes * rad);
    const cplx k1 = bessel_k(1, z), k2 = bessel_k(2, z);
    return std::abs(k1 - z * deriv - z * k2) / std::abs(z * k2);
}

}  // namespace reslab
