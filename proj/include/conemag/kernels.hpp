#pragma once

#include <complex>
#include <vector>

#include "conemag/geometry.hpp"
#include "conemag/spectrum.hpp"

namespace conemag {

struct TruncationSpec {
    int k_max = 40;       // starting angular cutoff; enlarged until the tail bound is negligible
    int quad_nodes = 16;  // Gauss-Legendre order of each integration panel
    double s_max = 40.0;  // cap on the length of real half-line integrals
    void validate() const;
};

struct KernelValue {
    std::complex<double> value;
    double largest_term = 0.0;
    TruncationSpec truncation;  // k_max holds the cutoff actually used
};

// Kernel of e^{-tH} as a sum over angular modes of modified Bessel functions.
KernelValue heat_kernel_series(double t, const ConePoint& p, const ConePoint& q, const ConeConfig& cfg,
                               const TruncationSpec& trunc = {});

// Series kernel at radii r1, r2 for several angle differences theta1 - theta2,
// sharing the Bessel evaluations.
std::vector<KernelValue> heat_kernel_series_row(double t, double r1, double r2,
                                               const std::vector<double>& theta_diffs, const ConeConfig& cfg,
                                               const TruncationSpec& trunc = {});

// Same kernel from the covering-space representation: a finite sum over the
// unfolded images within angle h of the diagonal plus contour integrals of
// the geometric kernel along the vertical segment [-ih, ih] and the two rays
// Im u = +-h.
KernelValue heat_kernel_closed(double t, const ConePoint& p, const ConePoint& q, const ConeConfig& cfg,
                               const TruncationSpec& trunc = {});

// Eigenfunction sum of e^{-t lambda} V~(p) conj V~(q) over the modes |k| <= k_max, m <= m_max.
KernelValue heat_kernel_spectral(double t, const ConePoint& p, const ConePoint& q, const ConeConfig& cfg,
                                 const Window& window);

// The two-fraction integrand of the half-line heat representation
// e^{s alpha}(e^{i alpha pi}/(e^{(s+tb0+i(theta+pi))/sigma}-1) - e^{-i alpha pi}/(e^{(s+tb0+i(theta-pi))/sigma}-1)).
std::complex<double> b_integrand(double s, double theta, double t, const ConeConfig& cfg);

// Kernel of e^{itH}. Throws SingularTimeError when |sin(t b0)| < 1e-6.
KernelValue schrodinger_kernel_series(double t, const ConePoint& p, const ConePoint& q, const ConeConfig& cfg,
                                      const TruncationSpec& trunc = {});
KernelValue schrodinger_kernel_closed(double t, const ConePoint& p, const ConePoint& q, const ConeConfig& cfg,
                                      const TruncationSpec& trunc = {});

// A(s, delta) = sum_k e^{ik delta/sigma} sin(pi alpha_k) e^{-s alpha_k}, summed in closed form.
// Accepts complex s (used on rotated contours).
std::complex<double> a_integrand(std::complex<double> s, double delta, const ConeConfig& cfg);
inline std::complex<double> a_integrand(double s, double delta, const ConeConfig& cfg) {
    return a_integrand(std::complex<double>(s, 0.0), delta, cfg);
}

// K(rho, delta) = sum_k e^{ik delta/sigma} I_{alpha_k}(i rho); rho may be negative.
KernelValue reduced_kernel(double rho, double delta, const ConeConfig& cfg, const TruncationSpec& trunc = {});

// K(rho, delta) for several delta sharing the Bessel evaluations.
std::vector<KernelValue> reduced_kernel_row(double rho, const std::vector<double>& deltas, const ConeConfig& cfg,
                                           const TruncationSpec& trunc = {});

// K(rho, delta) from the image sum plus the half-line integral of A.
KernelValue reduced_kernel_closed(double rho, double delta, const ConeConfig& cfg,
                                  const TruncationSpec& trunc = {});

// Modes used by the frequency-truncated half-wave kernel: k in [k_min, k_max], 0 <= m <= m_max.
struct HalfwaveWindow {
    int k_min = -40;
    int k_max = 40;
    int m_max = 40;
};

// Smallest window containing every mode of the shell 2^{j-1} <= sqrt(lambda) <= 2^{j+1}
// with k >= 0, plus negative modes down to k_min_hint.
HalfwaveWindow halfwave_shell_window(int j, const ConeConfig& cfg, int k_min);

// Precomputed half-wave kernel sum phi(2^{-j} sqrt(lambda)) e^{it sqrt(lambda)} V~(p) conj V~(q)
// on a fixed set of radii.
class HalfwaveKernel {
public:
    // Explicit window. Throws WindowTooSmallError if the shell is not covered, or if the
    // first omitted negative mode exceeds 1e-7 of the kept modes at some radius.
    HalfwaveKernel(int j, const ConeConfig& cfg, HalfwaveWindow window, std::vector<double> radii);
    // Window grown downward in k until the omitted negative modes are negligible on the radii.
    HalfwaveKernel(int j, const ConeConfig& cfg, std::vector<double> radii);

    // Kernel at (radii[i1], theta1), (radii[i2], theta2).
    std::complex<double> operator()(double t, std::size_t i1, std::size_t i2, double theta_diff) const;
    // Per-mode factors phi e^{it sqrt(lambda)}, shared by every radius pair at time t.
    std::vector<std::complex<double>> phases(double t) const;
    // Angular mode sums g_k(t, r1, r2) for all k in the window, index k - k_min; the kernel is
    // sum_k g_k e^{ik theta_diff/sigma} / (2 sigma pi).
    void angular_modes(const std::vector<std::complex<double>>& phase, std::size_t i1, std::size_t i2,
                       std::vector<std::complex<double>>& g) const;
    std::vector<std::complex<double>> angular_modes(double t, std::size_t i1, std::size_t i2) const;
    // g_k for radii[i1] against every radius: rows[i2 * (k_max - k_min + 1) + (k - k_min)].
    void angular_mode_row(const std::vector<std::complex<double>>& phase, std::size_t i1,
                          std::vector<std::complex<double>>& rows) const;

    const std::vector<double>& radii() const { return radii_; }
    const HalfwaveWindow& window() const { return window_; }
    std::size_t mode_count() const { return modes_.size(); }

private:
    struct Mode {
        int k;
        double sqrt_lambda;
        double weight;  // phi(2^{-j} sqrt(lambda))
        int lo, hi;     // radius indices where the radial factor is stored
        std::size_t offset;
    };
    void build(int j, bool grow);

    ConeConfig cfg_;
    HalfwaveWindow window_;
    std::vector<double> radii_;
    std::vector<Mode> modes_;          // sorted by k
    std::vector<std::size_t> k_begin_;  // modes of k = k_min + i are [k_begin_[i], k_begin_[i+1])
    std::vector<double> radial_;
};

std::complex<double> halfwave_kernel_truncated(int j, double t, const ConePoint& p, const ConePoint& q,
                                               const ConeConfig& cfg, const HalfwaveWindow& window);

}  // namespace conemag
