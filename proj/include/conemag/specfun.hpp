#pragma once

#include <complex>

namespace conemag {

struct SeriesResult {
    std::complex<double> value;
    double largest_term = 0.0;  // max modulus of any summed term
    int terms_used = 0;
};

struct SignedLog {
    double log_abs;
    int sign;
};

// log|Gamma(x)| with the sign of Gamma(x).
SignedLog log_gamma_signed(double x);

// log of the generalized binomial C(m + a, m) = Gamma(m+a+1)/(Gamma(m+1)Gamma(a+1)), a > -1.
double log_binomial(double a, int m);

// (a)_n = a (a+1) ... (a+n-1).
double pochhammer(double a, int n);

// Generalized Laguerre polynomial L^alpha_m(x) via the three-term recurrence.
double laguerre(double alpha, int m, double x);

// P_{k,m}(x) = C(m + alpha_k, m)^{-1} L^{alpha_k}_m(x) with alpha_k = |k/sigma + alpha|.
double p_poly(double k_over_sigma_plus_alpha, int m, double x);

// Confluent hypergeometric M(a, b, z).
SeriesResult kummer_m(double a, double b, std::complex<double> z);

// Tricomi U(a, b, z) for non-integer b, a > 0, z > 0.
double tricomi_u(double a, double b, double z);

// J_nu(x), nu >= 0, x >= 0.
double bessel_j(double nu, double x);

// I_nu(z) by the ascending series, principal branch of (z/2)^nu.
SeriesResult bessel_i(double nu, std::complex<double> z);

// e^{-|Re z|} I_nu(z) by the same series, usable where I_nu itself overflows.
SeriesResult bessel_i_scaled(double nu, std::complex<double> z);

// I_nu(i rho) for real rho through the rotation e^{i nu pi/2 sgn(rho)} J_nu(|rho|).
std::complex<double> bessel_i_imag(double nu, double rho);

}  // namespace conemag
