#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <random>

#include "conemag/errors.hpp"
#include "conemag/lpbesov.hpp"
#include "conemag/spectrum.hpp"

using namespace conemag;

namespace {

const ConeConfig kCones[] = {ConeConfig(1.0, 1.0, 0.25), ConeConfig(1.5, 1.0, 0.4), ConeConfig(2.0, 0.5, 0.3)};

// int_0^inf f(r) dr split at a few scales; the integrands decay like e^{-b0 r^2/2}.
template <class F>
double radial_integral(F f, double b0) {
    using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
    const double s = 1.0 / std::sqrt(b0);
    double total = 0.0;
    const double cuts[] = {0.0, 0.5 * s, 2.0 * s, 5.0 * s, 9.0 * s, 16.0 * s};
    for (int i = 0; i + 1 < 6; ++i) total += GK::integrate(f, cuts[i], cuts[i + 1], 15, 1e-14);
    return total;
}

}  // namespace

TEST_CASE("eigenvalues") {
    const ConeConfig& cfg = kCones[0];
    CHECK(mode_data({0, 0}, cfg).lambda == doctest::Approx(1.5));
    CHECK(mode_data({2, 1}, cfg).lambda == doctest::Approx(3.0 + 2.0 * 2.25));
    // Landau levels for every k <= -1
    for (int k = -1; k >= -6; --k) {
        CHECK(mode_data({k, 0}, cfg).lambda == 1.0);
        CHECK(mode_data({k, 3}, cfg).lambda == 7.0);
    }
    CHECK_THROWS_AS(mode_data({0, -1}, cfg), DomainError);
}

TEST_CASE("squared norms of the unnormalized eigenfunctions") {
    for (const auto& cfg : kCones) {
        for (ModeIndex idx : {ModeIndex{0, 0}, ModeIndex{1, 3}, ModeIndex{-2, 2}, ModeIndex{4, 1}}) {
            const double radial = radial_integral(
                [&](double r) { return std::norm(eigenfunction(idx, ConePoint(r, 0.0, cfg), cfg, false)) * r; },
                cfg.b0());
            CHECK(radial * cfg.period() == doctest::Approx(mode_data(idx, cfg).norm_sq).epsilon(1e-10));
        }
    }
}

TEST_CASE("normalized eigenfunctions are orthonormal") {
    for (const auto& cfg : kCones) {
        double worst = 0.0;
        for (int k = -4; k <= 4; ++k) {
            for (int m1 = 0; m1 <= 4; ++m1) {
                for (int m2 = m1; m2 <= 4; ++m2) {
                    const double g = radial_integral(
                        [&](double r) { return radial_factor({k, m1}, r, cfg) * radial_factor({k, m2}, r, cfg) * r; },
                        cfg.b0());
                    worst = std::max(worst, std::abs(g - (m1 == m2 ? 1.0 : 0.0)));
                }
            }
        }
        CHECK(worst < 1e-8);
    }
}

TEST_CASE("radial factors solve the eigenvalue equation") {
    std::mt19937_64 gen(11);
    std::uniform_int_distribution<int> dk(-5, 5), dm(0, 6);
    const double h = 1e-3;
    for (const auto& cfg : kCones) {
        for (int trial = 0; trial < 10; ++trial) {
            const ModeIndex idx{dk(gen), dm(gen)};
            const double lam = mode_data(idx, cfg).lambda;
            const double shift = idx.k / cfg.sigma() + cfg.alpha();
            double worst = 0.0, scale = 0.0;
            for (double r = 0.2; r <= 3.0; r += 0.05) {
                auto R = [&](double x) { return radial_factor(idx, x, cfg); };
                const double d2 = (-R(r + 2 * h) + 16 * R(r + h) - 30 * R(r) + 16 * R(r - h) - R(r - 2 * h)) / (12 * h * h);
                const double d1 = (-R(r + 2 * h) + 8 * R(r + h) - 8 * R(r - h) + R(r - 2 * h)) / (12 * h);
                const double pot = std::pow(shift + cfg.b0() * r * r / 2, 2) / (r * r);
                worst = std::max(worst, std::abs(-d2 - d1 / r + pot * R(r) - lam * R(r)));
                scale = std::max(scale, std::abs(lam * R(r)));
            }
            CHECK(worst / scale < 1e-5);
        }
    }
}

TEST_CASE("expand recovers a single eigenfunction") {
    const ConeConfig& cfg = kCones[1];
    const Window w{4, 4};
    const SpectralField f = expand([&](const ConePoint& p) { return eigenfunction({1, 0}, p, cfg, true); }, w, cfg);
    for (int k = -4; k <= 4; ++k) {
        for (int m = 0; m <= 4; ++m) {
            CHECK(std::abs(f.at(k, m) - (k == 1 && m == 0 ? 1.0 : 0.0)) < 1e-10);
        }
    }
}

TEST_CASE("expand after synthesize is the identity") {
    for (const auto& cfg : kCones) {
        const Window w{4, 4};
        const SpectralField f = random_field(w, 99);
        const SpectralField g = expand([&](const ConePoint& p) { return synthesize(f, p, cfg); }, w, cfg);
        double err = 0.0;
        for (std::size_t i = 0; i < f.coeffs().size(); ++i) err = std::max(err, std::abs(f.coeffs()[i] - g.coeffs()[i]));
        CHECK(err < 1e-8);
    }
}

TEST_CASE("grid synthesis matches pointwise synthesis") {
    const ConeConfig& cfg = kCones[2];
    const SpectralField f = random_field(Window{3, 3}, 5);
    const std::vector<double> radii{0.1, 0.9, 2.5};
    const std::vector<double> thetas{0.0, 1.0, 9.0};
    const auto grid = synthesize_grid(f, radii, thetas, cfg);
    for (std::size_t i = 0; i < radii.size(); ++i) {
        for (std::size_t j = 0; j < thetas.size(); ++j) {
            CHECK(std::abs(grid[i * thetas.size() + j] - synthesize(f, ConePoint(radii[i], thetas[j], cfg), cfg)) < 1e-13);
        }
    }
}

TEST_CASE("expansion from samples on a tensor grid") {
    const ConeConfig& cfg = kCones[0];
    const Window w{3, 3};
    const SpectralField f = random_field(w, 17);
    std::vector<double> radii;
    for (double r = 0.0; r <= 9.0; r += 0.01) radii.push_back(r);
    const int n_theta = 16;
    std::vector<double> thetas;
    for (int j = 0; j < n_theta; ++j) thetas.push_back(j * cfg.period() / n_theta);
    const SpectralField g = expand_samples(radii, n_theta, synthesize_grid(f, radii, thetas, cfg), w, cfg);
    double err = 0.0;
    for (std::size_t i = 0; i < f.coeffs().size(); ++i) err = std::max(err, std::abs(f.coeffs()[i] - g.coeffs()[i]));
    // trapezoid in r on a field that vanishes like r^{alpha_k} at the tip
    CHECK(err < 1e-3);
    CHECK_THROWS_AS(expand_samples(radii, 4, std::vector<std::complex<double>>(radii.size() * 4), w, cfg),
                    QuadratureError);
}

TEST_CASE("functional calculus") {
    const ConeConfig& cfg = kCones[0];
    const SpectralField f = random_field(Window{6, 6}, 3);
    const SpectralField half = spectral_apply(heat_multiplier(0.5), f, cfg);
    const SpectralField twice = spectral_apply(heat_multiplier(0.5), half, cfg);
    const SpectralField once = spectral_apply(heat_multiplier(1.0), f, cfg);
    for (std::size_t i = 0; i < f.coeffs().size(); ++i) CHECK(std::abs(twice.coeffs()[i] - once.coeffs()[i]) < 1e-14);
    for (double t : {0.3, 7.0, 1e3}) {
        CHECK(spectral_apply(schrodinger_multiplier(t), f, cfg).l2_norm() == doctest::Approx(f.l2_norm()).epsilon(1e-13));
        CHECK(spectral_apply(halfwave_multiplier(t), f, cfg).l2_norm() == doctest::Approx(f.l2_norm()).epsilon(1e-13));
    }
    const double lam = mode_data({2, 1}, cfg).lambda;
    const auto v = spectral_apply(fractional_multiplier(0.5, 2.0), f, cfg).at(2, 1);
    CHECK(std::abs(v - std::polar(1.0, 2.0 * std::sqrt(lam)) * f.at(2, 1)) < 1e-15);
}
