#pragma once

#include <cstdint>
#include <vector>

#include "conemag/geometry.hpp"
#include "conemag/spectrum.hpp"

namespace conemag {

// Smooth dyadic partition of unity on (0, inf).
// Mother bump psi(x) = exp(-1/(1 - log2(x)^2)) on (1/2, 2); phi = psi / sum_j psi(2^{-j} x).
// phi is supported in [1/2, 2], so at most two shells meet any point.
class DyadicCutoff {
public:
    double mother(double lambda) const;
    double operator()(double lambda) const;
    // phi_j(lambda) = phi(2^{-j} lambda)
    double shell(int j, double lambda) const;
    double support_lo() const { return 0.5; }
    double support_hi() const { return 2.0; }
};

DyadicCutoff make_cutoff();

// Evaluation grid for L^p norms: trapezoid in log r (radii up to where every
// window mode has decayed) x uniform angles.
struct LpGrid {
    std::vector<double> radii;
    std::vector<double> thetas;
    std::vector<double> weights;  // per radius, including r dr and the angular step
};
LpGrid make_lp_grid(const ConeConfig& cfg, const Window& window, int n_theta = 128);

// L^p norm on the grid; p = inf gives the grid maximum. p = 2 is computed exactly from coefficients.
double lp_norm(const SpectralField& f, double p, const ConeConfig& cfg, const LpGrid& grid);

// Shells j whose support meets the spectrum of the field (nonzero coefficients).
std::vector<int> active_shells(const SpectralField& f, const ConeConfig& cfg);

// phi_j(sqrt H) f
SpectralField shell_piece(const SpectralField& f, int j, const ConeConfig& cfg);

struct ShellTerm {
    int j;
    double lp;  // ||phi_j(sqrt H) f||_{L^p}
};

struct BesovReport {
    double s, p, q;
    double value;
    std::vector<ShellTerm> shells;
};

// Homogeneous Besov norm (sum_j 2^{jsq} ||phi_j(sqrt H) f||_p^q)^{1/q}.
// Throws WindowTooSmallError if the field has spectral content in the
// outermost shell that the window can represent.
BesovReport besov_norm(const SpectralField& f, double s, double p, double q, const ConeConfig& cfg,
                       const LpGrid* grid = nullptr);

// ||H^{s/2} f||_{L^2} from coefficients.
double sobolev_norm(const SpectralField& f, double s, const ConeConfig& cfg);
// ||(I + H)^{s/2} f||_{L^2}.
double inhomogeneous_sobolev_norm(const SpectralField& f, double s, const ConeConfig& cfg);

// Square-function identity at p = 2: returns (||(sum_j |phi_j f|^2)^{1/2}||_2^2, sum_j ||phi_j f||_2^2).
std::pair<double, double> square_function_l2(const SpectralField& f, const ConeConfig& cfg, const LpGrid& grid);

// Random field with unit L2 norm supported in the given shell j of the window.
SpectralField random_shell_field(int j, Window window, const ConeConfig& cfg, std::uint64_t seed);
// Random field with unit L2 norm, coefficients uniform on the unit disk over the whole window.
SpectralField random_field(Window window, std::uint64_t seed);

// Max over trial fields f of ||phi_j(sqrt H) f||_p / (2^{2j(1/q - 1/p)} ||f||_q).
double bernstein_ratio(int j, double p, double q_exp, const ConeConfig& cfg, Window window, int trials,
                       std::uint64_t seed, const LpGrid& grid);

}  // namespace conemag
