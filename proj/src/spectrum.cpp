#include "conemag/spectrum.hpp"

#include <cmath>
#include <span>

#include "conemag/errors.hpp"
#include "conemag/numerics.hpp"
#include "conemag/specfun.hpp"

namespace conemag {

SpectralField::SpectralField(Window w, std::vector<std::complex<double>> c)
    : window_(w), coeffs_(std::move(c)) {
    if (static_cast<int>(coeffs_.size()) != w.count()) {
        throw DomainError("SpectralField: coefficient count does not match the window");
    }
}

std::complex<double> SpectralField::at(int k, int m) const {
    if (std::abs(k) > window_.k_max || m < 0 || m > window_.m_max) return 0.0;
    return coeffs_[window_.index(k, m)];
}

void SpectralField::set(int k, int m, std::complex<double> v) {
    if (std::abs(k) > window_.k_max || m < 0 || m > window_.m_max) {
        throw DomainError("SpectralField::set: mode outside the window");
    }
    coeffs_[window_.index(k, m)] = v;
}

double SpectralField::l2_norm() const {
    std::vector<double> sq(coeffs_.size());
    for (std::size_t i = 0; i < coeffs_.size(); ++i) sq[i] = std::norm(coeffs_[i]);
    return std::sqrt(pairwise_sum(std::span<const double>(sq)));
}

ModeData mode_data(ModeIndex idx, const ConeConfig& cfg) {
    if (idx.m < 0) throw DomainError("mode_data: m must be >= 0");
    const double shift = idx.k / cfg.sigma() + cfg.alpha();
    ModeData d;
    d.alpha_k = std::abs(shift);
    // For shift < 0 the sum alpha_k + shift is exactly zero; never form it numerically.
    const double twice_pos = shift > 0.0 ? 2.0 * shift : 0.0;
    d.beta_k = (1.0 + twice_pos) * cfg.b0();
    d.lambda = (2.0 * idx.m + 1.0 + twice_pos) * cfg.b0();
    const double log_norm = d.alpha_k * std::log(2.0 / cfg.b0()) - std::log(cfg.b0()) +
                            std::lgamma(1.0 + d.alpha_k) - log_binomial(d.alpha_k, idx.m);
    d.norm_sq = std::exp(log_norm);
    return d;
}

namespace {

// log of the r-dependent prefactor of the normalized radial part, without the Laguerre factor.
double radial_log_prefactor(double ak, int m, double r, const ConeConfig& cfg) {
    const double b0 = cfg.b0();
    const double lb = log_binomial(ak, m);
    const double log_norm = ak * std::log(2.0 / b0) - std::log(b0) + std::lgamma(1.0 + ak) - lb;
    return ak * std::log(r) - 0.25 * b0 * r * r - lb - 0.5 * log_norm;
}

}  // namespace

double radial_factor(ModeIndex idx, double r, const ConeConfig& cfg) {
    const double ak = std::abs(idx.k / cfg.sigma() + cfg.alpha());
    if (r == 0.0) return 0.0;  // alpha_k > 0 for every k since alpha is not in Z/sigma
    const double u = 0.5 * cfg.b0() * r * r;
    return std::exp(radial_log_prefactor(ak, idx.m, r, cfg)) * laguerre(ak, idx.m, u);
}

std::complex<double> eigenfunction(ModeIndex idx, const ConePoint& p, const ConeConfig& cfg, bool normalized) {
    const double ang = idx.k / cfg.sigma() * p.theta();
    const std::complex<double> phase = std::polar(1.0 / std::sqrt(cfg.period()), ang);
    double rad = radial_factor(idx, p.r(), cfg);
    if (!normalized) rad *= std::sqrt(mode_data(idx, cfg).norm_sq);
    return rad * phase;
}

namespace {

std::vector<double> uniform_angles(int n, const ConeConfig& cfg) {
    std::vector<double> th(n);
    for (int j = 0; j < n; ++j) th[j] = cfg.period() * j / n;
    return th;
}

// Mean of g(theta_j) e^{-ik theta_j/sigma} over the uniform angles.
std::complex<double> angular_mode(const std::complex<double>* g, int n_theta, int k) {
    std::vector<std::complex<double>> terms(n_theta);
    for (int j = 0; j < n_theta; ++j) {
        const double ang = -2.0 * kPi * static_cast<double>(k) * j / n_theta;
        terms[j] = g[j] * std::polar(1.0, ang);
    }
    return pairwise_sum(std::span<const std::complex<double>>(terms)) / static_cast<double>(n_theta);
}

}  // namespace

SpectralField expand(const PointFn& f, Window window, const ConeConfig& cfg, const QuadratureSpec& quad) {
    if (window.k_max < 0 || window.m_max < 0) return SpectralField(window);
    if (2 * window.k_max >= quad.n_theta) {
        throw QuadratureError("expand: angular window exceeds half the angular sample count");
    }
    if (window.m_max >= quad.n_rad) throw QuadratureError("expand: radial window exceeds the radial node count");
    SpectralField out(window);
    const auto thetas = uniform_angles(quad.n_theta, cfg);
    const double b0 = cfg.b0();
    const double root_period = std::sqrt(cfg.period());
    std::vector<std::complex<double>> samples(quad.n_theta);
    for (int k = -window.k_max; k <= window.k_max; ++k) {
        const double ak = std::abs(k / cfg.sigma() + cfg.alpha());
        const LaguerreRule rule = gauss_laguerre(quad.n_rad, ak);
        std::vector<std::vector<std::complex<double>>> terms(window.m_max + 1);
        for (int i = 0; i < quad.n_rad; ++i) {
            const double u = rule.nodes[i];
            const double r = std::sqrt(2.0 * u / b0);
            for (int j = 0; j < quad.n_theta; ++j) samples[j] = f(ConePoint(r, thetas[j], cfg));
            const std::complex<double> fk = angular_mode(samples.data(), quad.n_theta, k);
            // int g(r) r dr = (1/b0) int g du; divide out the rule weight u^{ak} e^{-u}.
            const double w = std::exp(rule.log_weights[i] + u - ak * std::log(u)) / b0;
            for (int m = 0; m <= window.m_max; ++m) {
                terms[m].push_back(w * fk * radial_factor({k, m}, r, cfg));
            }
        }
        for (int m = 0; m <= window.m_max; ++m) {
            out.set(k, m, root_period * pairwise_sum(std::span<const std::complex<double>>(terms[m])));
        }
    }
    return out;
}

SpectralField expand_samples(const std::vector<double>& radii, int n_theta,
                             const std::vector<std::complex<double>>& values, Window window,
                             const ConeConfig& cfg) {
    const int nr = static_cast<int>(radii.size());
    if (nr < 2 || n_theta < 1) throw QuadratureError("expand_samples: need at least two radii and one angle");
    if (static_cast<int>(values.size()) != nr * n_theta) throw DomainError("expand_samples: sample count mismatch");
    if (2 * window.k_max >= n_theta) {
        throw QuadratureError("expand_samples: angular window exceeds half the angular sample count");
    }
    for (int i = 1; i < nr; ++i) {
        if (!(radii[i] > radii[i - 1])) throw DomainError("expand_samples: radii must be strictly increasing");
    }
    // Trapezoid weights for int g(r) r dr on the given radii.
    std::vector<double> w(nr, 0.0);
    for (int i = 0; i + 1 < nr; ++i) {
        const double h = radii[i + 1] - radii[i];
        w[i] += 0.5 * h * radii[i];
        w[i + 1] += 0.5 * h * radii[i + 1];
    }
    SpectralField out(window);
    const double root_period = std::sqrt(cfg.period());
    for (int k = -window.k_max; k <= window.k_max; ++k) {
        std::vector<std::complex<double>> fk(nr);
        for (int i = 0; i < nr; ++i) fk[i] = angular_mode(values.data() + i * n_theta, n_theta, k);
        for (int m = 0; m <= window.m_max; ++m) {
            std::vector<std::complex<double>> terms(nr);
            for (int i = 0; i < nr; ++i) terms[i] = w[i] * fk[i] * radial_factor({k, m}, radii[i], cfg);
            out.set(k, m, root_period * pairwise_sum(std::span<const std::complex<double>>(terms)));
        }
    }
    return out;
}

std::complex<double> synthesize(const SpectralField& field, const ConePoint& p, const ConeConfig& cfg) {
    const Window& w = field.window();
    if (w.k_max < 0 || w.m_max < 0) return 0.0;
    std::vector<std::complex<double>> terms;
    terms.reserve(w.count());
    for (int k = -w.k_max; k <= w.k_max; ++k) {
        for (int m = 0; m <= w.m_max; ++m) {
            const auto c = field.at(k, m);
            if (c == 0.0) continue;
            terms.push_back(c * eigenfunction({k, m}, p, cfg, true));
        }
    }
    return pairwise_sum(std::span<const std::complex<double>>(terms));
}

std::vector<std::complex<double>> synthesize_grid(const SpectralField& field, const std::vector<double>& radii,
                                                  const std::vector<double>& thetas, const ConeConfig& cfg) {
    const Window& w = field.window();
    std::vector<std::complex<double>> out(radii.size() * thetas.size(), 0.0);
    if (w.k_max < 0 || w.m_max < 0) return out;
    const int nk = 2 * w.k_max + 1;
    const double inv_root = 1.0 / std::sqrt(cfg.period());
    std::vector<std::complex<double>> gk(nk);
    std::vector<std::complex<double>> mterms(w.m_max + 1);
    std::vector<std::complex<double>> kterms(nk);
    for (std::size_t i = 0; i < radii.size(); ++i) {
        for (int k = -w.k_max; k <= w.k_max; ++k) {
            for (int m = 0; m <= w.m_max; ++m) {
                const auto c = field.at(k, m);
                mterms[m] = c == 0.0 ? 0.0 : c * radial_factor({k, m}, radii[i], cfg);
            }
            gk[k + w.k_max] = pairwise_sum(std::span<const std::complex<double>>(mterms));
        }
        for (std::size_t j = 0; j < thetas.size(); ++j) {
            for (int k = -w.k_max; k <= w.k_max; ++k) {
                kterms[k + w.k_max] = gk[k + w.k_max] * std::polar(inv_root, k / cfg.sigma() * thetas[j]);
            }
            out[i * thetas.size() + j] = pairwise_sum(std::span<const std::complex<double>>(kterms));
        }
    }
    return out;
}

SpectralField spectral_apply(const Multiplier& F, const SpectralField& field, const ConeConfig& cfg) {
    const Window& w = field.window();
    SpectralField out(w);
    for (int k = -w.k_max; k <= w.k_max; ++k) {
        for (int m = 0; m <= w.m_max; ++m) {
            out.set(k, m, F(mode_data({k, m}, cfg).lambda) * field.at(k, m));
        }
    }
    return out;
}

Multiplier heat_multiplier(double t) {
    return [t](double lam) { return std::complex<double>(std::exp(-t * lam), 0.0); };
}

Multiplier schrodinger_multiplier(double t) {
    return [t](double lam) { return std::polar(1.0, t * lam); };
}

Multiplier halfwave_multiplier(double t) {
    return [t](double lam) { return std::polar(1.0, t * std::sqrt(lam)); };
}

Multiplier fractional_multiplier(double nu, double t) {
    return [nu, t](double lam) { return std::polar(1.0, t * std::pow(lam, nu)); };
}

}  // namespace conemag
