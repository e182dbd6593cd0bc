#include <doctest.h>

#include <cmath>
#include <random>

#include "conemag/errors.hpp"
#include "conemag/lpbesov.hpp"
#include "conemag/verify.hpp"

using namespace conemag;

namespace {

const ConeConfig kCfg(1.0, 1.0, 0.25);

// Random field on the interior of the window: no content where besov_norm refuses it.
SpectralField interior_field(Window w, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> n;
    SpectralField f(w);
    for (int k = -w.k_max + 1; k < w.k_max; ++k) {
        for (int m = 0; m < w.m_max; ++m) f.set(k, m, {n(gen), n(gen)});
    }
    return f;
}

}  // namespace

TEST_CASE("cutoff support and range") {
    const DyadicCutoff phi = make_cutoff();
    CHECK(phi(0.4) == 0.0);
    CHECK(phi(0.5) == 0.0);
    CHECK(phi(2.0) == 0.0);
    CHECK(phi(2.1) == 0.0);
    CHECK(phi(1.0) == doctest::Approx(1.0));  // the neighbouring shells vanish at their support edges
    for (double x = 0.3; x < 3.0; x += 0.01) {
        CHECK(phi(x) >= 0.0);
        CHECK(phi(x) <= 1.0);
        CHECK(phi.shell(1, 2 * x) == doctest::Approx(phi(x)));
    }
}

TEST_CASE("dyadic partition of unity") {
    const DyadicCutoff phi;
    double worst = 0.0;
    for (int i = 0; i < 200; ++i) {
        const double x = std::pow(10.0, -3.0 + 6.0 * i / 199.0);
        double s = 0.0;
        int nonzero = 0;
        for (int j = -20; j <= 20; ++j) {
            const double v = phi.shell(j, x);
            s += v;
            nonzero += v > 0.0;
        }
        CHECK(nonzero <= 2);
        worst = std::max(worst, std::abs(s - 1.0));
    }
    CHECK(worst < 1e-12);
    CHECK(partition_of_unity_residual(200) < 1e-12);
}

TEST_CASE("grid L2 norm agrees with the coefficient norm") {
    const Window w{4, 4};
    const LpGrid grid = make_lp_grid(kCfg, w);
    const SpectralField f = interior_field(w, 1);
    const auto vals = synthesize_grid(f, grid.radii, grid.thetas, kCfg);
    double s = 0.0;
    for (std::size_t i = 0; i < vals.size(); ++i) s += grid.weights[i / grid.thetas.size()] * std::norm(vals[i]);
    CHECK(std::sqrt(s) == doctest::Approx(f.l2_norm()).epsilon(1e-10));
    // p close to 2 through the grid path
    CHECK(lp_norm(f, 2.0 + 1e-9, kCfg, grid) == doctest::Approx(f.l2_norm()).epsilon(1e-7));
    CHECK(lp_norm(f, INFINITY, kCfg, grid) > 0.0);
    CHECK_THROWS_AS(lp_norm(f, 0.5, kCfg, grid), DomainError);
}

TEST_CASE("single mode Besov norm lies between the overlap bounds") {
    const Window w{3, 3};
    for (int k = -2; k <= 2; ++k) {
        for (int m = 0; m <= 2; ++m) {
            SpectralField f(w);
            f.set(k, m, 1.0);
            const double v = besov_norm(f, 0.0, 2.0, 2.0, kCfg).value;
            CHECK(v >= 1.0 / std::sqrt(2.0) - 1e-12);
            CHECK(v <= 1.0 + 1e-12);
            // one unit of s multiplies each shell term by 2^j
            const auto r0 = besov_norm(f, 0.0, 2.0, 1.0, kCfg);
            const auto r1 = besov_norm(f, 1.0, 2.0, 1.0, kCfg);
            double expect = 0.0;
            for (const auto& t : r0.shells) expect += std::pow(2.0, t.j) * t.lp;
            CHECK(r1.value == doctest::Approx(expect));
        }
    }
}

TEST_CASE("Besov and Sobolev norms are equivalent") {
    const Window w{6, 6};
    for (double s : {-0.5, 0.0, 0.5}) {
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            const SpectralField f = interior_field(w, 100 + seed);
            const double ratio = besov_norm(f, s, 2.0, 2.0, kCfg).value / sobolev_norm(f, s, kCfg);
            CHECK(ratio >= 1.0 / std::sqrt(2.0) - 1e-6);
            CHECK(ratio <= std::sqrt(2.0) + 1e-6);
        }
    }
}

TEST_CASE("Sobolev norms from coefficients") {
    const Window w{3, 3};
    SpectralField f(w);
    f.set(1, 2, {0.6, 0.8});
    const double lam = mode_data({1, 2}, kCfg).lambda;
    CHECK(sobolev_norm(f, 1.5, kCfg) == doctest::Approx(std::pow(lam, 0.75)));
    CHECK(inhomogeneous_sobolev_norm(f, 1.5, kCfg) == doctest::Approx(std::pow(1.0 + lam, 0.75)));
    const SpectralField g = random_field(w, 4);
    CHECK(sobolev_norm(g, 0.0, kCfg) == doctest::Approx(g.l2_norm()));
}

TEST_CASE("square function identity at p = 2") {
    const Window w{5, 5};
    const LpGrid grid = make_lp_grid(kCfg, w);
    const SpectralField f = interior_field(w, 8);
    const auto [lhs, rhs] = square_function_l2(f, kCfg, grid);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
    const double n2 = f.l2_norm() * f.l2_norm();
    CHECK(rhs >= 0.5 * n2 * (1 - 1e-12));
    CHECK(rhs <= n2 * (1 + 1e-12));
}

TEST_CASE("fields touching the window edge are refused") {
    const Window w{3, 3};
    SpectralField f(w);
    f.set(0, 3, 1.0);
    CHECK_THROWS_AS(besov_norm(f, 0.0, 2.0, 2.0, kCfg), WindowTooSmallError);
}

TEST_CASE("random shell fields") {
    const Window w{8, 8};
    const DyadicCutoff phi;
    const SpectralField f = random_shell_field(1, w, kCfg, 3);
    CHECK(f.l2_norm() == doctest::Approx(1.0));
    for (int k = -8; k <= 8; ++k) {
        for (int m = 0; m <= 8; ++m) {
            if (f.at(k, m) != 0.0) CHECK(phi.shell(1, std::sqrt(mode_data({k, m}, kCfg).lambda)) > 0.0);
        }
    }
}

// sup_x sum phi_j(sqrt(lambda))^2 |V(x)|^2 is the squared L2 -> L^inf norm of phi_j(sqrt H),
// attained by f = phi_j(sqrt H)(., x0). Random trial fields only bound it from below.
double shell_sup_norm(int j, const ConeConfig& cfg, int window, double r_max) {
    const DyadicCutoff phi;
    double best = 0.0;
    for (double r = r_max / 200; r <= r_max; r += r_max / 200) {
        double s = 0.0;
        for (int k = -window; k <= window; ++k) {
            for (int m = 0; m <= window; ++m) {
                const double w = phi.shell(j, std::sqrt(mode_data({k, m}, cfg).lambda));
                if (w > 0.0) s += w * w * std::pow(radial_factor({k, m}, r, cfg), 2) / cfg.period();
            }
        }
        best = std::max(best, s);
    }
    return std::sqrt(best);
}

TEST_CASE("Bernstein constant for L2 to L-infinity is uniform across shells") {
    double lo = INFINITY, hi = 0.0;
    std::vector<double> norm;
    for (int j : {0, 1, 2}) {
        norm.push_back(shell_sup_norm(j, kCfg, 48, 5.0) / std::pow(2.0, j));
        lo = std::min(lo, norm.back());
        hi = std::max(hi, norm.back());
    }
    CHECK(hi / lo < 3.0);
    const Window w{12, 12};
    const LpGrid grid = make_lp_grid(kCfg, w, 64);
    for (int j : {0, 1}) {
        CHECK(bernstein_ratio(j, INFINITY, 2.0, kCfg, w, 3, 21, grid) <= norm[j] * (1 + 1e-9));
    }
    CHECK(bernstein_ratio(1, 4.0, 4.0, kCfg, w, 2, 5, grid) <= 1.0 + 1e-9);
}
