#include "conemag/lpbesov.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <span>

#include "conemag/errors.hpp"
#include "conemag/numerics.hpp"

namespace conemag {

double DyadicCutoff::mother(double lambda) const {
    if (!(lambda > 0.5 && lambda < 2.0)) return 0.0;
    const double x = std::log2(lambda);
    return std::exp(-1.0 / (1.0 - x * x));
}

double DyadicCutoff::operator()(double lambda) const {
    const double num = mother(lambda);
    if (num == 0.0) return 0.0;
    const int j0 = static_cast<int>(std::floor(std::log2(lambda)));
    double den = 0.0;
    for (int j = j0 - 1; j <= j0 + 2; ++j) den += mother(std::ldexp(lambda, -j));
    return num / den;
}

double DyadicCutoff::shell(int j, double lambda) const { return (*this)(std::ldexp(lambda, -j)); }

DyadicCutoff make_cutoff() { return {}; }

LpGrid make_lp_grid(const ConeConfig& cfg, const Window& window, int n_theta) {
    // Largest eigenvalue represented by the window bounds the radial extent.
    const double lam_max = mode_data({window.k_max, window.m_max}, cfg).lambda;
    const double u_max = 2.0 * lam_max / cfg.b0() + 80.0;
    const double r_max = std::sqrt(2.0 * u_max / cfg.b0());
    const RadialRule rr = log_radial_rule(std::log(1e-9), std::log(r_max), 0.01);
    LpGrid g;
    g.radii = rr.r;
    const double dth = cfg.period() / n_theta;
    for (double w : rr.w) g.weights.push_back(w * dth);
    for (int j = 0; j < n_theta; ++j) g.thetas.push_back(dth * j);
    return g;
}

double lp_norm(const SpectralField& f, double p, const ConeConfig& cfg, const LpGrid& grid) {
    if (!(p >= 1.0)) throw DomainError("lp_norm: p must be >= 1");
    if (p == 2.0) return f.l2_norm();
    const auto vals = synthesize_grid(f, grid.radii, grid.thetas, cfg);
    const std::size_t nt = grid.thetas.size();
    if (std::isinf(p)) {
        double mx = 0.0;
        for (const auto& v : vals) mx = std::max(mx, std::abs(v));
        return mx;
    }
    std::vector<double> terms(vals.size());
    for (std::size_t i = 0; i < vals.size(); ++i) terms[i] = grid.weights[i / nt] * std::pow(std::abs(vals[i]), p);
    return std::pow(pairwise_sum(std::span<const double>(terms)), 1.0 / p);
}

std::vector<int> active_shells(const SpectralField& f, const ConeConfig& cfg) {
    const Window& w = f.window();
    const DyadicCutoff phi;
    std::set<int> js;
    for (int k = -w.k_max; k <= w.k_max; ++k) {
        for (int m = 0; m <= w.m_max; ++m) {
            if (f.at(k, m) == 0.0) continue;
            const double root = std::sqrt(mode_data({k, m}, cfg).lambda);
            const int j0 = static_cast<int>(std::floor(std::log2(root)));
            for (int j = j0 - 1; j <= j0 + 2; ++j) {
                if (phi.shell(j, root) > 0.0) js.insert(j);
            }
        }
    }
    return {js.begin(), js.end()};
}

SpectralField shell_piece(const SpectralField& f, int j, const ConeConfig& cfg) {
    const DyadicCutoff phi;
    return spectral_apply([&](double lam) { return std::complex<double>(phi.shell(j, std::sqrt(lam)), 0.0); }, f, cfg);
}

namespace {

void require_interior_support(const SpectralField& f) {
    const Window& w = f.window();
    for (int k = -w.k_max; k <= w.k_max; ++k) {
        for (int m = 0; m <= w.m_max; ++m) {
            const bool edge = m == w.m_max || std::abs(k) == w.k_max;
            if (edge && f.at(k, m) != 0.0) {
                throw WindowTooSmallError("field has spectral content on the edge of its mode window");
            }
        }
    }
}

}  // namespace

BesovReport besov_norm(const SpectralField& f, double s, double p, double q, const ConeConfig& cfg,
                       const LpGrid* grid) {
    if (!(p >= 1.0) || !(q >= 1.0)) throw DomainError("besov_norm: p, q must be >= 1");
    require_interior_support(f);
    LpGrid local;
    if (p != 2.0 && grid == nullptr) {
        local = make_lp_grid(cfg, f.window());
        grid = &local;
    }
    BesovReport rep{s, p, q, 0.0, {}};
    std::vector<double> terms;
    for (int j : active_shells(f, cfg)) {
        const SpectralField piece = shell_piece(f, j, cfg);
        const double lp = p == 2.0 ? piece.l2_norm() : lp_norm(piece, p, cfg, *grid);
        rep.shells.push_back({j, lp});
        const double weighted = std::pow(2.0, j * s) * lp;
        terms.push_back(std::isinf(q) ? weighted : std::pow(weighted, q));
    }
    if (terms.empty()) return rep;
    if (std::isinf(q)) {
        rep.value = *std::max_element(terms.begin(), terms.end());
    } else {
        rep.value = std::pow(pairwise_sum(std::span<const double>(terms)), 1.0 / q);
    }
    return rep;
}

double sobolev_norm(const SpectralField& f, double s, const ConeConfig& cfg) {
    return spectral_apply([s](double lam) { return std::complex<double>(std::pow(lam, 0.5 * s), 0.0); }, f, cfg)
        .l2_norm();
}

double inhomogeneous_sobolev_norm(const SpectralField& f, double s, const ConeConfig& cfg) {
    return spectral_apply([s](double lam) { return std::complex<double>(std::pow(1.0 + lam, 0.5 * s), 0.0); }, f,
                          cfg)
        .l2_norm();
}

std::pair<double, double> square_function_l2(const SpectralField& f, const ConeConfig& cfg, const LpGrid& grid) {
    const auto shells = active_shells(f, cfg);
    const std::size_t npts = grid.radii.size() * grid.thetas.size();
    std::vector<double> sq(npts, 0.0);
    std::vector<double> coeff_terms;
    for (int j : shells) {
        const SpectralField piece = shell_piece(f, j, cfg);
        const auto vals = synthesize_grid(piece, grid.radii, grid.thetas, cfg);
        for (std::size_t i = 0; i < npts; ++i) sq[i] += std::norm(vals[i]);
        coeff_terms.push_back(piece.l2_norm() * piece.l2_norm());
    }
    const std::size_t nt = grid.thetas.size();
    std::vector<double> wq(npts);
    for (std::size_t i = 0; i < npts; ++i) wq[i] = grid.weights[i / nt] * sq[i];
    return {pairwise_sum(std::span<const double>(wq)), pairwise_sum(std::span<const double>(coeff_terms))};
}

namespace {

// Uniform double in [0, 1) from the top 53 bits; independent of the standard library's distributions.
double unit(std::mt19937_64& g) { return static_cast<double>(g() >> 11) * 0x1.0p-53; }

std::complex<double> disk_sample(std::mt19937_64& g) {
    for (;;) {
        const double x = 2.0 * unit(g) - 1.0;
        const double y = 2.0 * unit(g) - 1.0;
        if (x * x + y * y <= 1.0) return {x, y};
    }
}

SpectralField normalized(SpectralField f) {
    const double n = f.l2_norm();
    if (n == 0.0) return f;
    std::vector<std::complex<double>> c = f.coeffs();
    for (auto& v : c) v /= n;
    return SpectralField(f.window(), std::move(c));
}

}  // namespace

SpectralField random_field(Window window, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    SpectralField f(window);
    for (int k = -window.k_max; k <= window.k_max; ++k) {
        for (int m = 0; m <= window.m_max; ++m) f.set(k, m, disk_sample(gen));
    }
    return normalized(std::move(f));
}

SpectralField random_shell_field(int j, Window window, const ConeConfig& cfg, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    const DyadicCutoff phi;
    SpectralField f(window);
    for (int k = -window.k_max; k <= window.k_max; ++k) {
        for (int m = 0; m <= window.m_max; ++m) {
            const auto z = disk_sample(gen);
            if (phi.shell(j, std::sqrt(mode_data({k, m}, cfg).lambda)) > 0.0) f.set(k, m, z);
        }
    }
    return normalized(std::move(f));
}

double bernstein_ratio(int j, double p, double q_exp, const ConeConfig& cfg, Window window, int trials,
                       std::uint64_t seed, const LpGrid& grid) {
    if (!(q_exp >= 1.0 && q_exp <= p)) throw DomainError("bernstein_ratio: requires 1 <= q <= p");
    const double expo = 2.0 * j * (1.0 / q_exp - (std::isinf(p) ? 0.0 : 1.0 / p));
    double best = 0.0;
    for (int trial = 0; trial < trials; ++trial) {
        const SpectralField f = random_shell_field(j, window, cfg, seed + static_cast<std::uint64_t>(trial));
        if (f.l2_norm() == 0.0) throw WindowTooSmallError("bernstein_ratio: no modes of the shell in the window");
        const double num = lp_norm(shell_piece(f, j, cfg), p, cfg, grid);
        const double den = std::pow(2.0, expo) * lp_norm(f, q_exp, cfg, grid);
        best = std::max(best, num / den);
    }
    return best;
}

}  // namespace conemag
