#include "conemag/specfun.hpp"

#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <limits>

#include "conemag/errors.hpp"
#include "conemag/geometry.hpp"

namespace conemag {

namespace {

constexpr int kMaxTerms = 10000;
constexpr double kTailRel = 1e-16;

bool is_nonpositive_integer(double x) { return x <= 0.0 && x == std::floor(x); }

// Series sum sum_n t_n where t_{n+1} = t_n * ratio(n). Stops after two
// consecutive terms below the relative tail threshold once the terms have
// started to decrease, or when a term is exactly zero (terminating series).
template <class Ratio>
SeriesResult sum_series(std::complex<double> first, Ratio ratio, double decreasing_after) {
    SeriesResult out;
    std::complex<double> term = first;
    std::complex<double> sum = first;
    out.largest_term = std::abs(first);
    int small_run = 0;
    int n = 0;
    for (;;) {
        if (term == 0.0) break;
        if (n + 1 >= kMaxTerms) {
            throw NonconvergenceError("series did not converge within 10^4 terms");
        }
        term *= ratio(n);
        ++n;
        sum += term;
        const double mag = std::abs(term);
        out.largest_term = std::max(out.largest_term, mag);
        if (n > decreasing_after && mag <= kTailRel * std::abs(sum)) {
            if (++small_run >= 2) break;
        } else {
            small_run = 0;
        }
        if (!std::isfinite(mag)) throw NonconvergenceError("series overflow");
    }
    out.value = sum;
    out.terms_used = n + 1;
    return out;
}

}  // namespace

SignedLog log_gamma_signed(double x) {
    int sign = 1;
    const double v = boost::math::lgamma(x, &sign);
    return {v, sign};
}

double log_binomial(double a, int m) {
    return std::lgamma(m + a + 1.0) - std::lgamma(m + 1.0) - std::lgamma(a + 1.0);
}

double pochhammer(double a, int n) {
    double p = 1.0;
    for (int i = 0; i < n; ++i) p *= a + i;
    return p;
}

double laguerre(double alpha, int m, double x) {
    if (m == 0) return 1.0;
    double prev = 1.0;
    double cur = 1.0 + alpha - x;
    for (int n = 1; n < m; ++n) {
        const double next = ((2.0 * n + 1.0 + alpha - x) * cur - (n + alpha) * prev) / (n + 1.0);
        prev = cur;
        cur = next;
    }
    return cur;
}

double p_poly(double k_over_sigma_plus_alpha, int m, double x) {
    const double ak = std::abs(k_over_sigma_plus_alpha);
    return laguerre(ak, m, x) * std::exp(-log_binomial(ak, m));
}

SeriesResult kummer_m(double a, double b, std::complex<double> z) {
    if (is_nonpositive_integer(b)) throw DomainError("kummer_m: b must not be a non-positive integer");
    auto ratio = [&](int n) { return (a + n) / ((b + n) * (n + 1.0)) * z; };
    // Terms grow until n ~ |z| (and past -a for negative a); only then is the tail bound meaningful.
    const double after = std::abs(z) + std::abs(a) + std::abs(b);
    return sum_series(std::complex<double>(1.0), ratio, after);
}

namespace {

// z^{-a} sum (a)_n (a-b+1)_n / n! (-z)^{-n}, truncated at the smallest term.
bool tricomi_asymptotic(double a, double b, double z, double& out) {
    double term = 1.0;
    double sum = 1.0;
    for (int n = 0; n < 200; ++n) {
        const double next = term * (a + n) * (a - b + 1.0 + n) / ((n + 1.0) * -z);
        if (std::abs(next) >= std::abs(term)) break;
        term = next;
        sum += term;
        if (std::abs(term) < 1e-16 * std::abs(sum)) {
            out = std::pow(z, -a) * sum;
            return true;
        }
    }
    return false;
}

}  // namespace

double tricomi_u(double a, double b, double z) {
    if (b == std::floor(b)) throw DomainError("tricomi_u: integer b is not supported");
    if (!(a > 0.0)) throw DomainError("tricomi_u: requires a > 0");
    if (!(z > 0.0)) throw DomainError("tricomi_u: requires z > 0");
    double asym = 0.0;
    if (z > 20.0 && tricomi_asymptotic(a, b, z, asym)) return asym;

    double first = 0.0;
    if (!is_nonpositive_integer(a - b + 1.0)) {
        const auto g1 = log_gamma_signed(1.0 - b);
        const auto g2 = log_gamma_signed(a - b + 1.0);
        first = g1.sign * g2.sign * std::exp(g1.log_abs - g2.log_abs) * kummer_m(a, b, z).value.real();
    }
    const auto g3 = log_gamma_signed(b - 1.0);
    const auto g4 = log_gamma_signed(a);
    const double second = g3.sign * g4.sign * std::exp(g3.log_abs - g4.log_abs + (1.0 - b) * std::log(z)) *
                          kummer_m(a - b + 1.0, 2.0 - b, z).value.real();
    return first + second;
}

double bessel_j(double nu, double x) {
    if (nu < 0.0 || x < 0.0) throw DomainError("bessel_j: requires nu >= 0 and x >= 0");
    return boost::math::cyl_bessel_j(nu, x);
}

SeriesResult bessel_i_scaled(double nu, std::complex<double> z) {
    if (nu < 0.0) throw DomainError("bessel_i: negative order");
    if (z == 0.0) {
        SeriesResult r;
        r.value = nu == 0.0 ? 1.0 : 0.0;
        r.largest_term = std::abs(r.value);
        r.terms_used = 1;
        return r;
    }
    if (std::abs(z) > 700.0) throw NonconvergenceError("bessel_i: argument too large for the ascending series");
    const std::complex<double> q = 0.25 * z * z;
    auto ratio = [&](int m) { return q / ((m + 1.0) * (m + 1.0 + nu)); };
    SeriesResult s = sum_series(std::complex<double>(1.0), ratio, 0.5 * std::abs(z));
    const std::complex<double> log_pref =
        nu * std::log(0.5 * z) - std::lgamma(nu + 1.0) - std::abs(z.real());
    const std::complex<double> pref = std::exp(log_pref);
    s.value *= pref;
    s.largest_term *= std::abs(pref);
    return s;
}

SeriesResult bessel_i(double nu, std::complex<double> z) {
    SeriesResult s = bessel_i_scaled(nu, z);
    const double scale = std::exp(std::abs(z.real()));
    s.value *= scale;
    s.largest_term *= scale;
    return s;
}

std::complex<double> bessel_i_imag(double nu, double rho) {
    const double j = bessel_j(nu, std::abs(rho));
    const double phase = (rho >= 0.0 ? 0.5 : -0.5) * nu * kPi;
    return std::polar(j, phase);
}

}  // namespace conemag
