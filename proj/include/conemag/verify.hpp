#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "conemag/geometry.hpp"
#include "conemag/kernels.hpp"
#include "conemag/spectrum.hpp"

namespace conemag {

// Tabulated samples behind a sweep, written as CSV.
struct SampleTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

struct SweepReport {
    std::string name;
    ConeConfig config{1.0, 1.0, 0.25};
    std::string grid_spec;
    double empirical_constant = 0.0;
    double refinement_ratio = 0.0;  // constant on the refined grid / constant on the base grid
    bool pass = false;
    long runtime_ms = 0;            // wall clock; excluded from serialized output unless requested
    std::vector<std::pair<std::string, double>> extras;
    std::vector<SweepReport> parts;
    SampleTable samples;
};

// Grid refinement: every grid dimension n becomes 2n - 1, so the base grid is a subset.
inline int refined(int n) { return 2 * n - 1; }

// Times t with t*b0 in (0, 2 pi) and |sin(t b0)| >= sin_floor, n_t per half period.
struct TimeGrid {
    int n_t = 9;
    double sin_floor = 0.05;
};

// Log-spaced radii on [r_min, r_max] and n_theta equally spaced angle differences over a period.
struct SpaceGrid {
    int n_r = 9;
    double r_min = 0.05;
    double r_max = 2.0;
    int n_theta = 17;
};

std::vector<double> time_points(const TimeGrid& g, const ConeConfig& cfg);
std::vector<double> log_points(int n, double lo, double hi);
std::vector<double> angle_points(int n, const ConeConfig& cfg);

// sup |K^S_t(p, q)| |sin(t b0)| / b0 over the grids, evaluated through the reduced kernel,
// since |K^S_t| = b0 |K(rho, delta)| / (4 pi sigma |sin(t b0)|).
SweepReport dispersive_constant_schrodinger(const ConeConfig& cfg, const TimeGrid& tg, const SpaceGrid& sg,
                                            const TruncationSpec& trunc = {});

// sup |rho|^{-gamma} |K(rho, delta)| / (4 pi sigma), rho = b0 r1 r2 / (2 sin(t b0)), with
// sub-reports over |rho| >= 1 and |rho| < 1. gamma = 0 reproduces the unweighted constant exactly.
// Throws GammaOutOfRangeError unless 0 <= gamma <= kappa_sigma.
SweepReport weighted_dispersive_constant(const ConeConfig& cfg, double gamma, const TimeGrid& tg,
                                         const SpaceGrid& sg, const TruncationSpec& trunc = {});

// Several weights from one set of kernel evaluations.
std::vector<SweepReport> weighted_dispersive_family(const ConeConfig& cfg, const std::vector<double>& gammas,
                                                    const TimeGrid& tg, const SpaceGrid& sg,
                                                    const TruncationSpec& trunc = {});

// sup |K^H_t(p, q)| sinh(t b0) e^{b0 min(d^2, r1^2 + r2^2) / (4 tanh(t b0))} over t in times (units of 1/b0)
// and the space grid, d the cone distance. Direct images obey the Gaussian in d, the tip-diffracted
// part the one in r1^2 + r2^2. Radii are in units of sqrt(tanh(t b0) / b0).
struct HeatGrid {
    std::vector<double> times{0.1, 1.0, 5.0};
    SpaceGrid space{17, 0.05, 3.5, 33};
};
SweepReport gaussian_heat_constant(const ConeConfig& cfg, const HeatGrid& grid, const TruncationSpec& trunc = {});

// sup over rho in [0, rho_max], |delta| <= R of |K(rho, delta)|; rho_max doubles from rho_start
// until the running sup grows by less than 1%.
struct ReducedScanGrid {
    double rho_step = 0.25;
    double rho_start = 8.0;
    double rho_cap = 256.0;
    int n_delta = 33;
};
SweepReport reduced_kernel_bound_scan(const ConeConfig& cfg, double R, const ReducedScanGrid& grid,
                                      const TruncationSpec& trunc = {});

// sup over delta of the L1 norm in s of A(s, delta).
SweepReport a_integrand_l1_bound(const ConeConfig& cfg, int n_delta = 65);

// Least-squares slope of log sup_{p,q} |half-wave kernel| against log(1 + 2^j t) for t on a
// log grid in [2^{-j}, 2^j pi / (2 b0)]. Pass requires the slope in [-0.75, -0.35].
struct HalfwaveGrid {
    int n_t = 13;
    int radial_per_scale = 4;  // radial samples per 2^{-j}
    int n_p = 8;               // radii of the first point
    int oversample = 4;        // angular samples per angular mode
};
SweepReport halfwave_decay_fit(const ConeConfig& cfg, int j, const HalfwaveGrid& grid);

// Max relative error of e^{-z sqrt(y)} = z/(2 sqrt(pi)) int_0^inf e^{-sy - z^2/(4s)} s^{-3/2} ds.
SweepReport subordination_identity_check(const std::vector<double>& z, const std::vector<double>& y);

// Coefficient-norm conservation of e^{it sqrt H} and e^{itH} over random fields and times,
// plus the heat contraction bound.
SweepReport energy_conservation_check(const ConeConfig& cfg, const Window& window, int trials, std::uint64_t seed);

// Numeric checks used by the acceptance harness.
// Max |int_0^inf e^{-t^2} J_nu(at) J_nu(bt) t dt - e^{-(a^2+b^2)/4} I_nu(ab/2) / 2| over random triples.
double bessel_product_identity_error(int trials, std::uint64_t seed);
// Max |sum_j phi(2^{-j} x) - 1| over a log grid of x.
double partition_of_unity_residual(int n_points);

}  // namespace conemag
