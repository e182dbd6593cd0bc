#include <doctest.h>

#include <cmath>
#include <complex>

#include "conemag/errors.hpp"
#include "conemag/kernels.hpp"
#include "conemag/lpbesov.hpp"

using namespace conemag;
using cplx = std::complex<double>;

namespace {

const ConeConfig kCones[] = {ConeConfig(1.0, 1.0, 0.25), ConeConfig(1.5, 1.0, 0.4), ConeConfig(2.0, 0.5, 0.3)};

double rel(cplx a, cplx b) { return std::abs(a - b) / std::abs(b); }

// Landau heat kernel of the plane, x ^ y = x1 y2 - x2 y1.
cplx landau_heat(double t, double b0, const ConePoint& p, const ConePoint& q) {
    const double x1 = p.r() * std::cos(p.theta()), y1 = p.r() * std::sin(p.theta());
    const double x2 = q.r() * std::cos(q.theta()), y2 = q.r() * std::sin(q.theta());
    const double d2 = (x1 - x2) * (x1 - x2) + (y1 - y2) * (y1 - y2);
    const double amp = b0 / (4 * kPi * std::sinh(t * b0)) * std::exp(-b0 * d2 / (4 * std::tanh(t * b0)));
    return std::polar(amp, 0.5 * b0 * (x1 * y2 - y1 * x2));
}

// Landau Schroedinger kernel, the analytic continuation t -> -it of the heat kernel.
cplx landau_schrodinger(double t, double b0, const ConePoint& p, const ConePoint& q) {
    const double x1 = p.r() * std::cos(p.theta()), y1 = p.r() * std::sin(p.theta());
    const double x2 = q.r() * std::cos(q.theta()), y2 = q.r() * std::sin(q.theta());
    const double d2 = (x1 - x2) * (x1 - x2) + (y1 - y2) * (y1 - y2);
    const cplx s = -cplx(0.0, 1.0) * t;
    return b0 / (4 * kPi * std::sinh(s * b0)) * std::exp(-b0 * d2 / (4.0 * std::tanh(s * b0))) *
           std::polar(1.0, 0.5 * b0 * (x1 * y2 - y1 * x2));
}

}  // namespace

TEST_CASE("heat kernel reduces to the Landau kernel on the plane") {
    const ConeConfig cfg(1.0, 1.0, 1e-9);
    const ConePoint d(1.0, 0.0, cfg);
    CHECK(heat_kernel_series(1.0, d, d, cfg).value.real() == doctest::Approx(1.0 / (4 * kPi * std::sinh(1.0))).epsilon(1e-8));
    for (double t : {0.2, 1.0, 3.0}) {
        for (auto pq : {std::array<double, 4>{1.0, 0.2, 0.7, 1.3}, {0.4, 2.0, 1.5, 5.0}, {2.0, 0.0, 2.0, 3.0}}) {
            const ConePoint p(pq[0], pq[1], cfg), q(pq[2], pq[3], cfg);
            CHECK(rel(heat_kernel_series(t, p, q, cfg).value, landau_heat(t, 1.0, p, q)) < 1e-7);
            CHECK(rel(heat_kernel_closed(t, p, q, cfg).value, landau_heat(t, 1.0, p, q)) < 1e-7);
        }
    }
}

TEST_CASE("Schroedinger kernel reduces to the Landau kernel on the plane") {
    const ConeConfig cfg(1.0, 1.0, 1e-9);
    for (double t : {0.4, 2.0, 4.0}) {
        const ConePoint p(1.0, 0.2, cfg), q(0.7, 1.3, cfg);
        CHECK(rel(schrodinger_kernel_series(t, p, q, cfg).value, landau_schrodinger(t, 1.0, p, q)) < 1e-6);
        CHECK(rel(schrodinger_kernel_closed(t, p, q, cfg).value, landau_schrodinger(t, 1.0, p, q)) < 1e-6);
    }
}

TEST_CASE("heat kernel: series, closed form and eigenfunction sum agree") {
    for (const auto& cfg : kCones) {
        for (double t : {0.3, 1.0, 2.5}) {
            for (auto pq : {std::array<double, 4>{1.0, 0.3, 0.5, 1.0}, {0.2, 0.0, 1.7, 4.0}, {1.2, 1.0, 1.2, 1.0}}) {
                const ConePoint p(pq[0], pq[1], cfg), q(pq[2], pq[3], cfg);
                const auto s = heat_kernel_series(t, p, q, cfg);
                CHECK(rel(heat_kernel_closed(t, p, q, cfg).value, s.value) < 1e-8);
                CHECK(s.largest_term > 0.0);
                if (t >= 1.0) CHECK(rel(heat_kernel_spectral(t, p, q, cfg, Window{30, 30}).value, s.value) < 1e-6);
            }
        }
    }
}

TEST_CASE("heat kernel row matches pointwise evaluation") {
    const ConeConfig& cfg = kCones[2];
    const std::vector<double> diffs{-3.0, 0.0, 0.4, 5.0};
    const auto row = heat_kernel_series_row(0.7, 0.8, 1.3, diffs, cfg);
    for (std::size_t i = 0; i < diffs.size(); ++i) {
        const auto v = heat_kernel_series(0.7, ConePoint(0.8, diffs[i], cfg), ConePoint(1.3, 0.0, cfg), cfg);
        CHECK(rel(row[i].value, v.value) < 1e-13);
    }
}

TEST_CASE("kernels are Hermitian") {
    for (const auto& cfg : kCones) {
        const ConePoint p(0.9, 0.4, cfg), q(1.4, 2.9, cfg);
        CHECK(std::abs(heat_kernel_series(0.8, p, q, cfg).value - std::conj(heat_kernel_series(0.8, q, p, cfg).value)) <
              1e-12);
        const auto a = schrodinger_kernel_closed(0.8, p, q, cfg).value;
        const auto b = schrodinger_kernel_closed(-0.8, q, p, cfg).value;
        CHECK(std::abs(a - std::conj(b)) < 1e-12 * std::abs(a));
    }
}

TEST_CASE("Schroedinger kernel: series and closed form agree") {
    for (const auto& cfg : kCones) {
        for (double tb : {0.4, 1.3, 2.0, 3.9, 5.5}) {
            const double t = tb / cfg.b0();
            for (auto pq : {std::array<double, 4>{1.0, 0.3, 0.5, 1.0}, {0.3, 0.0, 1.6, 4.0}}) {
                const ConePoint p(pq[0], pq[1], cfg), q(pq[2], pq[3], cfg);
                CHECK(rel(schrodinger_kernel_closed(t, p, q, cfg).value, schrodinger_kernel_series(t, p, q, cfg).value) <
                      1e-6);
            }
        }
    }
}

TEST_CASE("Schroedinger kernel is singular at multiples of pi / b0") {
    const ConeConfig& cfg = kCones[0];
    const ConePoint p(1.0, 0.0, cfg);
    CHECK_THROWS_AS(schrodinger_kernel_series(kPi, p, p, cfg), SingularTimeError);
    CHECK_THROWS_AS(schrodinger_kernel_closed(2 * kPi, p, p, cfg), SingularTimeError);
    try {
        schrodinger_kernel_closed(kPi, p, p, cfg);
    } catch (const Error& e) {
        CHECK(e.exit_code() == 3);
    }
}

TEST_CASE("A integrand matches its defining mode sum") {
    for (const auto& cfg : kCones) {
        for (double s : {0.05, 0.7, 3.0}) {
            for (double delta : {-2.0, 0.0, 1.1, 3.0}) {
                cplx direct = 0.0;
                for (int k = -4000; k <= 4000; ++k) {
                    const double ak = std::abs(k / cfg.sigma() + cfg.alpha());
                    direct += std::polar(std::sin(kPi * ak) * std::exp(-s * ak), k * delta / cfg.sigma());
                }
                CHECK(std::abs(a_integrand(s, delta, cfg) - direct) < 1e-10 * std::max(1.0, std::abs(direct)));
            }
        }
    }
}

TEST_CASE("two-fraction integrand") {
    const ConeConfig& cfg = kCones[1];
    const double s = 0.8, th = 1.2, t = 0.5, a = cfg.alpha(), sg = cfg.sigma(), b0 = cfg.b0();
    const cplx i(0.0, 1.0);
    const cplx ref = std::exp(s * a) * (std::exp(i * a * kPi) / (std::exp((s + t * b0 + i * (th + kPi)) / sg) - 1.0) -
                                        std::exp(-i * a * kPi) / (std::exp((s + t * b0 + i * (th - kPi)) / sg) - 1.0));
    CHECK(rel(b_integrand(s, th, t, cfg), ref) < 1e-14);
}

TEST_CASE("reduced kernel: series, row and closed form") {
    for (const auto& cfg : kCones) {
        const std::vector<double> deltas{-3.0, -0.5, 0.0, 1.0, 2.9};
        for (double rho : {-6.0, -0.7, 0.3, 2.0, 11.0}) {
            const auto row = reduced_kernel_row(rho, deltas, cfg);
            for (std::size_t i = 0; i < deltas.size(); ++i) {
                const auto one = reduced_kernel(rho, deltas[i], cfg);
                CHECK(std::abs(row[i].value - one.value) < 1e-12 * std::max(1.0, one.largest_term));
                const auto closed = reduced_kernel_closed(rho, deltas[i], cfg);
                CHECK(std::abs(closed.value - one.value) < 1e-8 * std::max(1.0, one.largest_term));
            }
        }
        // rho = 0: only I_0 survives, and alpha_k > 0 for every k
        CHECK(std::abs(reduced_kernel(0.0, 0.4, cfg).value) < 1e-300);
    }
}

TEST_CASE("frequency-truncated half-wave kernel against a direct mode sum") {
    const ConeConfig& cfg = kCones[0];
    const int j = 1;
    const DyadicCutoff phi;
    const double r1 = 0.8, r2 = 1.5, dth = 0.7;
    const HalfwaveKernel hk(j, cfg, {r1, r2});
    for (double t : {0.0, 0.5, 2.0}) {
        cplx direct = 0.0;
        for (int k = -60; k <= 60; ++k) {
            for (int m = 0; m <= 40; ++m) {
                const double root = std::sqrt(mode_data({k, m}, cfg).lambda);
                const double w = phi.shell(j, root);
                if (w == 0.0) continue;
                direct += w * std::polar(radial_factor({k, m}, r1, cfg) * radial_factor({k, m}, r2, cfg) / cfg.period(),
                                         t * root + k * dth / cfg.sigma());
            }
        }
        CHECK(std::abs(hk(t, 0, 1, dth) - direct) < 1e-12);
        const auto trunc = halfwave_kernel_truncated(j, t, ConePoint(r1, dth, cfg), ConePoint(r2, 0.0, cfg), cfg,
                                                     HalfwaveWindow{-60, 60, 40});
        CHECK(std::abs(trunc - direct) < 1e-12);
        // angular modes sum to the kernel
        const auto g = hk.angular_modes(t, 0, 1);
        cplx s = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            s += g[i] * std::polar(1.0, (hk.window().k_min + static_cast<int>(i)) * dth / cfg.sigma());
        }
        CHECK(std::abs(s / cfg.period() - direct) < 1e-12);
    }
    CHECK(std::abs(hk(1.0, 0, 1, dth) - std::conj(hk(-1.0, 1, 0, -dth))) < 1e-14);
    CHECK_THROWS_AS(HalfwaveKernel(j, cfg, HalfwaveWindow{-1, 2, 2}, {1.0}), WindowTooSmallError);
}

TEST_CASE("truncation settings are validated") {
    TruncationSpec t;
    t.quad_nodes = 0;
    CHECK_THROWS_AS(t.validate(), ConfigError);
}
