#pragma once

#include <complex>
#include <functional>
#include <span>
#include <vector>

namespace conemag {

using cplx = std::complex<double>;

// Deterministic pairwise summation; blocks of <= 32 are summed left to right.
double pairwise_sum(std::span<const double> v);
cplx pairwise_sum(std::span<const cplx> v);

struct Rule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// n-point Gauss-Legendre on [-1, 1]. Cached per n, thread-safe.
const Rule& gauss_legendre(int n);

// n-point Gauss rule for the weight u^a e^{-u} on (0, inf).
// Weights are returned as logarithms because the tail ones underflow.
struct LaguerreRule {
    std::vector<double> nodes;
    std::vector<double> log_weights;
};
LaguerreRule gauss_laguerre(int n, double a);

struct AdaptiveOptions {
    int order = 16;         // Gauss-Legendre points per panel
    double abs_tol = 1e-15;
    double rel_tol = 1e-13;
    int max_depth = 48;
    int max_panels = 200000;
};

struct IntegralResult {
    cplx value;
    double error_estimate;
    double l1 = 0.0;  // integral of |f|, the scale of the roundoff in value
    int panels;
    bool converged;
};

using ComplexFn = std::function<cplx(double)>;

// Adaptive composite Gauss: each panel is compared with its two halves and
// bisected until the local error fits the budget. `breaks` are extra
// panel boundaries (sorted or not; values outside (a, b) are ignored).
IntegralResult integrate(const ComplexFn& f, double a, double b, const AdaptiveOptions& opt = {},
                         std::span<const double> breaks = {});

// Same, for a complex path z(x), x in [a, b], with derivative dz(x).
IntegralResult integrate_path(const std::function<cplx(cplx)>& f,
                              const std::function<cplx(double)>& z,
                              const std::function<cplx(double)>& dz, double a, double b,
                              const AdaptiveOptions& opt = {},
                              std::span<const double> breaks = {});

// Radial rule for integrals of g(r) r dr on (0, inf): trapezoid in log r.
// Exponentially convergent for integrands analytic in log r that decay
// algebraically at 0 and like a Gaussian at infinity.
struct RadialRule {
    std::vector<double> r;
    std::vector<double> w;  // includes the r dr Jacobian
};
RadialRule log_radial_rule(double log_r_min, double log_r_max, double step);

}  // namespace conemag
