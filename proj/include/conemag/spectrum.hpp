#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "conemag/geometry.hpp"

namespace conemag {

struct ModeIndex {
    int k;
    int m;
};

struct ModeData {
    double alpha_k;  // |k/sigma + alpha|
    double beta_k;   // (1 + alpha_k + k/sigma + alpha) b0
    double lambda;   // eigenvalue
    double norm_sq;  // squared L2 norm of the unnormalized eigenfunction
};

// Modes |k| <= k_max, 0 <= m <= m_max.
struct Window {
    int k_max = 24;
    int m_max = 24;
    int count() const { return (2 * k_max + 1) * (m_max + 1); }
    int index(int k, int m) const { return (k + k_max) * (m_max + 1) + m; }
};

class SpectralField {
public:
    SpectralField() = default;
    explicit SpectralField(Window w) : window_(w), coeffs_(w.count(), 0.0) {}
    SpectralField(Window w, std::vector<std::complex<double>> c);

    const Window& window() const { return window_; }
    const std::vector<std::complex<double>>& coeffs() const { return coeffs_; }
    std::complex<double> at(int k, int m) const;
    void set(int k, int m, std::complex<double> v);
    // sqrt(sum |c|^2), the L2 norm of the represented function.
    double l2_norm() const;

private:
    Window window_{0, -1};
    std::vector<std::complex<double>> coeffs_;
};

struct QuadratureSpec {
    int n_rad = 80;     // Gauss-Laguerre nodes in u = b0 r^2 / 2
    int n_theta = 128;  // trapezoid nodes on [0, 2 sigma pi)
};

ModeData mode_data(ModeIndex idx, const ConeConfig& cfg);

// Radial part of the normalized eigenfunction: V~_{k,m}(r, theta) = R(r) e^{ik theta/sigma} / sqrt(2 sigma pi).
double radial_factor(ModeIndex idx, double r, const ConeConfig& cfg);

std::complex<double> eigenfunction(ModeIndex idx, const ConePoint& p, const ConeConfig& cfg, bool normalized);

using PointFn = std::function<std::complex<double>(const ConePoint&)>;

SpectralField expand(const PointFn& f, Window window, const ConeConfig& cfg, const QuadratureSpec& quad = {});

// Expansion of samples on a tensor grid: radii (ascending, trapezoid in r) x
// n_theta uniform angles theta_j = j * 2 sigma pi / n_theta. values[i * n_theta + j].
SpectralField expand_samples(const std::vector<double>& radii, int n_theta,
                             const std::vector<std::complex<double>>& values, Window window,
                             const ConeConfig& cfg);

std::complex<double> synthesize(const SpectralField& field, const ConePoint& p, const ConeConfig& cfg);

// Values of the field on the tensor grid radii x thetas, row-major in r.
std::vector<std::complex<double>> synthesize_grid(const SpectralField& field, const std::vector<double>& radii,
                                                  const std::vector<double>& thetas, const ConeConfig& cfg);

using Multiplier = std::function<std::complex<double>(double)>;

SpectralField spectral_apply(const Multiplier& F, const SpectralField& field, const ConeConfig& cfg);

// Named multipliers used by the CLI and the verification sweeps.
Multiplier heat_multiplier(double t);
Multiplier schrodinger_multiplier(double t);
Multiplier halfwave_multiplier(double t);
Multiplier fractional_multiplier(double nu, double t);

}  // namespace conemag
