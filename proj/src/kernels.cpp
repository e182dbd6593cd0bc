#include "conemag/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>

#include "conemag/errors.hpp"
#include "conemag/lpbesov.hpp"
#include "conemag/numerics.hpp"
#include "conemag/specfun.hpp"

#include <quadmath.h>

namespace conemag {

using cplx = std::complex<double>;
constexpr cplx kI{0.0, 1.0};

void TruncationSpec::validate() const {
    if (k_max < 1) throw ConfigError("k_max must be >= 1");
    if (quad_nodes < 16) throw ConfigError("quad_nodes must be >= 16");
    if (!(s_max >= 10.0)) throw ConfigError("s_max must be >= 10");
}

namespace {

constexpr double kTailRel = 1e-12;
constexpr int kHardKCap = 20000;

double alpha_k(int k, const ConeConfig& cfg) { return std::abs(k / cfg.sigma() + cfg.alpha()); }

AdaptiveOptions quad_options(const TruncationSpec& trunc) {
    AdaptiveOptions o;
    o.order = trunc.quad_nodes;
    o.abs_tol = 1e-300;
    o.rel_tol = 1e-14;
    return o;
}

void require_converged(const IntegralResult& r, const char* what) {
    if (!r.converged) throw NonconvergenceError(std::string(what) + ": adaptive quadrature did not converge");
}

struct ModeCoef {
    int k;
    cplx c;
};

// Collects coefficients c_k for k = 0, +-1, +-2, ... until |k| >= k_start and the
// tail bound from `envelope` is below kTailRel times a fraction of the largest
// coefficient (an angle-independent stand-in for the running magnitude).
template <class Coef, class Envelope>
std::vector<ModeCoef> collect_modes(const Coef& coef, const Envelope& envelope, int k_start, int& k_used,
                                    double& largest) {
    std::vector<ModeCoef> out;
    double cmax = 0.0;
    auto add = [&](int k) {
        double big = 0.0;
        const cplx c = coef(k, big);
        out.push_back({k, c});
        cmax = std::max(cmax, std::abs(c));
        largest = std::max(largest, big);
    };
    add(0);
    int n = 1;
    for (;; ++n) {
        if (n > kHardKCap) throw NonconvergenceError("angular mode sum did not converge");
        add(n);
        add(-n);
        if (n < k_start) continue;
        const double e1 = envelope(n + 1) + envelope(-n - 1);
        if (e1 == 0.0) break;
        const double e2 = envelope(n + 2) + envelope(-n - 2);
        if (e2 >= e1) continue;
        const double tail = e1 / (1.0 - e2 / e1);
        if (tail <= kTailRel * 1e-3 * cmax) break;
    }
    k_used = n;
    return out;
}

cplx angular_sum(const std::vector<ModeCoef>& modes, double angle, double sigma) {
    std::vector<cplx> terms(modes.size());
    for (std::size_t i = 0; i < modes.size(); ++i) {
        terms[i] = modes[i].c * std::polar(1.0, modes[i].k * angle / sigma);
    }
    return pairwise_sum(std::span<const cplx>(terms));
}

struct HeatGeometry {
    double tau, sh, x, gexp, theta;
};

// Cancellation ratio largest_term / |value| above which the heat series is redone in quad precision.
constexpr double kQuadCancellation = 1e4;

// Heat mode sum with every coefficient and phase in __float128, for angles where the double sum
// cancels. Modes are added until they fall below 1e-20 of `target`, the smallest value sought.
std::vector<cplx> heat_series_quad(double t, double r1, double r2, const std::vector<double>& thetas,
                                   const ConeConfig& cfg, double target, int& k_used) {
    using quad = __float128;
    const quad b0 = cfg.b0(), sigma = cfg.sigma(), alpha = cfg.alpha();
    const quad tau = static_cast<quad>(t) * b0;
    const quad sh = sinhq(tau);
    const quad x = b0 * static_cast<quad>(r1) * static_cast<quad>(r2) / (2 * sh);
    const quad gexp = b0 * (static_cast<quad>(r1) * r1 + static_cast<quad>(r2) * r2) / (4 * tanhq(tau));
    const quad log_pref = logq(b0 / (4 * M_PIq * sigma * sh)) - tau * alpha - gexp;
    const quad q = x * x / 4;
    const quad log_half_x = logq(x / 2);
    // pref e^{-k tau/sigma} e^{-gexp} I_{alpha_k}(x) from the ascending series
    auto coef = [&](int k) -> quad {
        const quad nu = fabsq(static_cast<quad>(k) / sigma + alpha);
        quad term = 1, sum = 1;
        for (int m = 0; m < 100000; ++m) {
            term *= q / ((m + 1) * (m + 1 + nu));
            sum += term;
            if (term < 1e-36 * sum && m > q) break;
        }
        return expq(log_pref - k * tau / sigma + nu * log_half_x - lgammaq(nu + 1)) * sum;
    };
    std::vector<quad> re(thetas.size(), 0), im(thetas.size(), 0);
    auto add = [&](int k, quad c) {
        for (std::size_t i = 0; i < thetas.size(); ++i) {
            const quad ang = k * static_cast<quad>(thetas[i]) / sigma;
            re[i] += c * cosq(ang);
            im[i] += c * sinq(ang);
        }
    };
    add(0, coef(0));
    const quad floor = static_cast<quad>(target) * 1e-20;
    int n = 1;
    for (;; ++n) {
        if (n > kHardKCap) throw NonconvergenceError("angular mode sum did not converge");
        const quad cp = coef(n), cm = coef(-n);
        add(n, cp);
        add(-n, cm);
        if (n >= k_used && cp < floor && cm < floor) break;
    }
    k_used = n;
    std::vector<cplx> out(thetas.size());
    for (std::size_t i = 0; i < thetas.size(); ++i) {
        out[i] = cplx(static_cast<double>(re[i]), static_cast<double>(im[i]));
    }
    return out;
}

HeatGeometry heat_geometry(double t, const ConePoint& p, const ConePoint& q, const ConeConfig& cfg) {
    if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("heat kernel requires t > 0");
    HeatGeometry g;
    g.tau = t * cfg.b0();
    g.sh = std::sinh(g.tau);
    g.x = cfg.b0() * p.r() * q.r() / (2.0 * g.sh);
    g.gexp = cfg.b0() * (p.r() * p.r() + q.r() * q.r()) / (4.0 * std::tanh(g.tau));
    g.theta = angular_difference(p.theta(), q.theta(), cfg);
    return g;
}

}  // namespace

std::vector<KernelValue> heat_kernel_series_row(double t, double r1, double r2,
                                               const std::vector<double>& theta_diffs, const ConeConfig& cfg,
                                               const TruncationSpec& trunc) {
    trunc.validate();
    const auto g = heat_geometry(t, ConePoint(r1, 0.0, cfg), ConePoint(r2, 0.0, cfg), cfg);
    const double sigma = cfg.sigma();
    const double log_pref = std::log(cfg.b0() / (4.0 * kPi * sigma * g.sh)) - g.tau * cfg.alpha();
    std::vector<KernelValue> out(theta_diffs.size());
    for (auto& o : out) o.truncation = trunc;
    if (g.x == 0.0) {
        // I_nu(0) = 0 for nu > 0 and every alpha_k is positive.
        for (auto& o : out) o.value = 0.0;
        return out;
    }
    // Coefficient of e^{ik theta/sigma}: pref e^{-k tau/sigma} e^{-gexp} I_{alpha_k}(x).
    auto coef = [&](int k, double& big) -> cplx {
        const double ak = alpha_k(k, cfg);
        const SeriesResult bi = bessel_i_scaled(ak, g.x);
        const double iv = bi.value.real();
        if (iv <= 0.0) return 0.0;
        const double lmag = log_pref - k * g.tau / sigma + g.x - g.gexp;
        big = std::exp(lmag + std::log(std::max(bi.largest_term, iv)));
        return std::exp(lmag + std::log(iv));
    };
    const double lx2 = std::log(0.5 * g.x);
    auto envelope = [&](int k) {
        const double ak = alpha_k(k, cfg);
        return std::exp(log_pref - k * g.tau / sigma - g.gexp + ak * lx2 - std::lgamma(ak + 1.0) +
                        g.x * g.x / (4.0 * (ak + 1.0)));
    };
    int k_used = 0;
    double largest = 0.0;
    const auto modes = collect_modes(coef, envelope, trunc.k_max, k_used, largest);
    std::vector<double> redo;
    for (std::size_t i = 0; i < theta_diffs.size(); ++i) {
        out[i].value = angular_sum(modes, theta_diffs[i], sigma);
        out[i].largest_term = largest;
        out[i].truncation.k_max = k_used;
        const double mag = std::abs(out[i].value);
        if (mag > 0.0 && largest > kQuadCancellation * mag) redo.push_back(theta_diffs[i]);
    }
    if (!redo.empty()) {
        // Far from the diagonal the mode sum cancels; its terms carry absolute roundoff of
        // eps * largest. Recompute those angles with coefficients in quad precision.
        double target = largest;
        for (auto& o : out) {
            if (std::abs(o.value) > 0.0) target = std::min(target, std::abs(o.value));
        }
        int k_quad = k_used;
        const auto vals = heat_series_quad(t, r1, r2, redo, cfg, target, k_quad);
        std::size_t next = 0;
        for (std::size_t i = 0; i < theta_diffs.size() && next < redo.size(); ++i) {
            if (theta_diffs[i] != redo[next]) continue;
            out[i].value = vals[next++];
            out[i].truncation.k_max = k_quad;
        }
    }
    return out;
}

KernelValue heat_kernel_series(double t, const ConePoint& p, const ConePoint& q, const ConeConfig& cfg,
                               const TruncationSpec& trunc) {
    const double th = angular_difference(p.theta(), q.theta(), cfg);
    return heat_kernel_series_row(t, p.r(), q.r(), {th}, cfg, trunc).front();
}

namespace {

// Geometric kernel G(u) = sum over k >= 0 and k < 0 branches of e^{ik w/sigma} e^{-alpha_k u}, w = theta + i tau.
cplx heat_g(cplx u, cplx w, const ConeConfig& cfg) {
    const double s = cfg.sigma();
    const double a = cfg.alpha();
    const cplx e1 = (kI * w - u) / s;
    const cplx first = std::exp(-a * u) / (1.0 - std::exp(e1));
    const cplx e2 = (u + kI * w) / s;
    cplx second;
    if (e2.real() > 0.0) {
        second = std::exp(a * u - e2) / (1.0 - std::exp(-e2));
    } else {
        second = std::exp(a * u) / (std::exp(e2) - 1.0);
    }
    return first + second;
}

// Angle h in [pi - 0.5, pi + 0.5] farthest from every |theta_n|; keeps the
// horizontal rays away from the poles of G.
double choose_ray_angle(const std::vector<double>& abs_images) {
    double best_h = kPi;
    double best_d = -1.0;
    for (int i = 0; i <= 40; ++i) {
        const double h = kPi - 0.5 + i * (1.0 / 40.0);
        double d = std::numeric_limits<double>::infinity();
        for (double a : abs_images) d = std::min(d, std::abs(a - h));
        if (d > best_d) {
            best_d = d;
            best_h = h;
        }
    }
    return best_h;
}

// ---- quad-precision contour, used when the double contour integral cancels

using quad = __float128;

struct QC {
    quad re, im;
};
QC operator+(QC a, QC b) { return {a.re + b.re, a.im + b.im}; }
QC operator-(QC a, QC b) { return {a.re - b.re, a.im - b.im}; }
QC operator*(QC a, QC b) { return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re}; }
QC operator*(quad s, QC a) { return {s * a.re, s * a.im}; }
QC operator/(QC a, QC b) {
    const quad d = b.re * b.re + b.im * b.im;
    return {(a.re * b.re + a.im * b.im) / d, (a.im * b.re - a.re * b.im) / d};
}
QC qexp(QC z) {
    const quad m = expq(z.re);
    return {m * cosq(z.im), m * sinq(z.im)};
}
quad qabs(QC z) { return hypotq(z.re, z.im); }

QC heat_g_quad(QC u, QC w, quad s, quad a) {
    const QC one{1, 0};
    const QC iw{-w.im, w.re};
    const QC e1 = (1 / s) * (iw - u);
    const QC first = qexp((-a) * u) / (one - qexp(e1));
    const QC e2 = (1 / s) * (u + iw);
    if (e2.re > 0) return first + qexp(a * u - e2) / (one - qexp((-1) * e2));
    return first + qexp(a * u) / (qexp(e2) - one);
}

struct QuadRule {
    std::vector<quad> x, w;
};

// Gauss-Legendre nodes on [-1, 1] by Newton iteration in quad precision.
const QuadRule& gauss_legendre_quad() {
    static const QuadRule rule = [] {
        constexpr int n = 30;
        QuadRule r;
        for (int i = 0; i < n; ++i) {
            quad z = cosq(M_PIq * (i + 0.75Q) / (n + 0.5Q));
            quad dp = 0;
            for (int it = 0; it < 100; ++it) {
                quad p0 = 1, p1 = z;
                for (int k = 2; k <= n; ++k) {
                    const quad p2 = ((2 * k - 1) * z * p1 - (k - 1) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n * (z * p1 - p0) / (z * z - 1);
                const quad dz = p1 / dp;
                z -= dz;
                if (fabsq(dz) < 1e-33Q) break;
            }
            quad p0 = 1, p1 = z;
            for (int k = 2; k <= n; ++k) {
                const quad p2 = ((2 * k - 1) * z * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (z * p1 - p0) / (z * z - 1);
            r.x.push_back(z);
            r.w.push_back(2 / ((1 - z * z) * dp * dp));
        }
        return r;
    }();
    return rule;
}

template <class F>
QC panel_quad(const F& f, quad a, quad b) {
    const auto& r = gauss_legendre_quad();
    const quad c = (a + b) / 2, hw = (b - a) / 2;
    QC s{0, 0};
    for (std::size_t i = 0; i < r.x.size(); ++i) s = s + (r.w[i] * hw) * f(c + hw * r.x[i]);
    return s;
}

// Adaptive bisection over [a, b] split at `breaks`; each accepted panel meets its share of abs_tol.
template <class F>
QC integrate_quad(const F& f, double a, double b, std::vector<double> breaks, quad abs_tol) {
    std::vector<double> pts{a};
    std::sort(breaks.begin(), breaks.end());
    for (double c : breaks) {
        if (c > a && c < b && c - pts.back() > 1e-12 * (b - a)) pts.push_back(c);
    }
    pts.push_back(b);
    const quad total = static_cast<quad>(b) - a;
    QC sum{0, 0};
    std::vector<std::pair<quad, quad>> stack;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) stack.emplace_back(pts[i], pts[i + 1]);
    int panels = 0;
    while (!stack.empty()) {
        const auto [lo, hi] = stack.back();
        stack.pop_back();
        const quad mid = (lo + hi) / 2;
        const QC whole = panel_quad(f, lo, hi);
        const QC halves = panel_quad(f, lo, mid) + panel_quad(f, mid, hi);
        if (qabs(whole - halves) <= abs_tol * (hi - lo) / total) {
            sum = sum + halves;
            continue;
        }
        if (++panels > 20000) throw NonconvergenceError("heat_kernel_closed: quad-precision contour did not converge");
        stack.emplace_back(lo, mid);
        stack.emplace_back(mid, hi);
    }
    return sum;
}

// The closed form evaluated entirely in quad precision from the double inputs. `h`, `v_end` and the
// break points only place the contour and panels, so they are taken from the double pass.
cplx heat_closed_quad(double t, double r1, double r2, double theta, const ConeConfig& cfg, double h_d,
                      double v_end, const std::vector<double>& vbreaks, const std::vector<double>& lbreaks,
                      double scale, double rel_tol) {
    const quad b0 = cfg.b0(), sigma = cfg.sigma(), alpha = cfg.alpha();
    const quad tau = static_cast<quad>(t) * b0;
    const quad sh = sinhq(tau), ch = coshq(tau);
    const quad x = b0 * static_cast<quad>(r1) * r2 / (2 * sh);
    const quad gexp = b0 * (static_cast<quad>(r1) * r1 + static_cast<quad>(r2) * r2) / (4 * tanhq(tau));
    const quad th = theta;
    const quad h = h_d;
    const quad cos_h = cosq(h), sin_h = sinq(h);
    const QC w{th, tau};

    QC images{0, 0};
    for (int n = -2; n <= 2; ++n) {
        const quad tn = th - 2 * M_PIq * sigma * n;
        if (fabsq(tn) >= h) continue;
        images = images + qexp({-gexp + x * ch * cosq(tn), -x * sh * sinq(tn) - alpha * tn});
    }
    images = sigma * images;

    auto fv = [&](quad y) { return expq(x * cosq(y) - gexp) * heat_g_quad({0, y}, w, sigma, alpha); };
    auto fl = [&](quad v) {
        const quad re = x * coshq(v) * cos_h - gexp;
        const quad ph = x * sinhq(v) * sin_h;
        const QC up = qexp({re, ph}) * heat_g_quad({v, h}, w, sigma, alpha);
        const QC dn = qexp({re, -ph}) * heat_g_quad({v, -h}, w, sigma, alpha);
        return up - dn;
    };
    const quad damp = expq(-tau * alpha);
    const quad pref = b0 / (4 * M_PIq * sigma * sh);
    // `scale` (the double-precision estimate of |K|) fixes the absolute target of both integrals.
    const quad tol = 2 * M_PIq * rel_tol * static_cast<quad>(scale) / (pref * damp);
    const QC vi = integrate_quad(fv, -h_d, h_d, vbreaks, tol);
    const QC li = integrate_quad(fl, 0.0, v_end, lbreaks, tol);
    const QC value = images + damp * ((1 / (2 * M_PIq)) * (vi + QC{li.im, -li.re}));
    return {static_cast<double>(pref * value.re), static_cast<double>(pref * value.im)};
}

}  // namespace

KernelValue heat_kernel_closed(double t, const ConePoint& p, const ConePoint& q, const ConeConfig& cfg,
                               const TruncationSpec& trunc) {
    trunc.validate();
    const auto g = heat_geometry(t, p, q, cfg);
    KernelValue out;
    out.truncation = trunc;
    out.truncation.k_max = 0;
    if (g.x == 0.0) {
        out.value = 0.0;
        return out;
    }
    const double sigma = cfg.sigma();
    const double alpha = cfg.alpha();
    const double ch = std::cosh(g.tau);
    std::vector<double> images, abs_images;
    for (int n = -2; n <= 2; ++n) {
        const double tn = g.theta - 2.0 * kPi * sigma * n;
        images.push_back(tn);
        abs_images.push_back(std::abs(tn));
    }
    const double h = choose_ray_angle(abs_images);

    // Unfolded images inside the sector |theta_n| < h.
    std::vector<cplx> img_terms;
    for (double tn : images) {
        if (std::abs(tn) >= h) continue;
        const double re = -g.gexp + g.x * ch * std::cos(tn);
        const double im = -g.x * g.sh * std::sin(tn) - alpha * tn;
        img_terms.push_back(std::polar(std::exp(re), im));
    }
    const cplx image_sum = sigma * pairwise_sum(std::span<const cplx>(img_terms));

    const cplx w(g.theta, g.tau);
    // The contour part is added to the image sum, so its error is measured against that
    // scale too; for tiny alpha the contour integrand is O(alpha) and carries roundoff of O(1).
    auto opt = quad_options(trunc);
    opt.abs_tol = std::max(opt.abs_tol, 1e-15 * std::abs(image_sum));

    // Vertical segment u = iy, y in [-h, h].
    std::vector<double> vbreaks{0.0};
    for (double tn : images) {
        for (double c : {tn, -tn}) {
            vbreaks.push_back(c);
            vbreaks.push_back(c - g.tau);
            vbreaks.push_back(c + g.tau);
        }
    }
    auto fv = [&](double y) { return std::exp(g.x * std::cos(y) - g.gexp) * heat_g(cplx(0.0, y), w, cfg); };

    // Rays u = v +- ih, v >= 0.
    const double cos_h = std::cos(h);
    const double sin_h = std::sin(h);
    const double decay = std::min(alpha, 1.0 / sigma - alpha);
    double v_end = std::asinh((45.0 + g.x) / (g.x * std::abs(cos_h)));
    if (decay > 0.0) v_end = std::min(v_end, (45.0 + g.x) / decay);
    v_end = std::min(v_end, trunc.s_max);
    auto fl = [&](double v) {
        const double cv = std::cosh(v), sv = std::sinh(v);
        const double re = g.x * cv * cos_h - g.gexp;
        const cplx up = std::polar(std::exp(re), g.x * sv * sin_h) * heat_g(cplx(v, h), w, cfg);
        const cplx dn = std::polar(std::exp(re), -g.x * sv * sin_h) * heat_g(cplx(v, -h), w, cfg);
        return up - dn;
    };
    std::vector<double> lbreaks{0.5 * g.tau, g.tau, 2.0 * g.tau, 4.0 * g.tau};

    const double pref = cfg.b0() / (4.0 * kPi * sigma * g.sh);
    const double damp = std::exp(-g.tau * alpha);
    auto contour = [&](const AdaptiveOptions& o, bool strict, double& l1) {
        const auto vres = integrate(fv, -h, h, o, vbreaks);
        const auto lres = integrate(fl, 0.0, v_end, o, lbreaks);
        if (strict) {
            require_converged(vres, "heat_kernel_closed");
            require_converged(lres, "heat_kernel_closed");
        }
        l1 = (vres.l1 + lres.l1) / (2.0 * kPi);
        return vres.value / (2.0 * kPi) + lres.value / (2.0 * kPi * kI);
    };
    double l1 = 0.0;
    cplx cont = contour(opt, true, l1);
    out.value = pref * (image_sum + damp * cont);
    // Far from the diagonal the contour integrand is much larger than the result; tighten the
    // panel tolerance to the result itself. Roundoff may stop this short of convergence, which
    // largest_term then reports.
    if (opt.rel_tol * l1 * damp * pref > 1e-14 * std::abs(out.value) && std::abs(out.value) > 0.0) {
        AdaptiveOptions tight = opt;
        tight.rel_tol = 0.0;
        tight.abs_tol = 1e-16 * std::abs(out.value) / (pref * damp);
        tight.max_panels = 4000;
        cont = contour(tight, false, l1);
        out.value = pref * (image_sum + damp * cont);
    }
    double big = 0.0;
    for (const auto& v : img_terms) big = std::max(big, sigma * std::abs(v));
    out.largest_term = pref * std::max(big, damp * l1);
    if (out.largest_term > kQuadCancellation * std::abs(out.value) && std::abs(out.value) > 0.0) {
        // Roundoff of eps * largest_term swamps the result; redo the whole integral in quad precision.
        out.value = heat_closed_quad(t, p.r(), q.r(), g.theta, cfg, h, v_end, vbreaks, lbreaks, std::abs(out.value), 1e-15);
    }
    return out;
}

KernelValue heat_kernel_spectral(double t, const ConePoint& p, const ConePoint& q, const ConeConfig& cfg,
                                 const Window& window) {
    if (!(t > 0.0)) throw DomainError("heat kernel requires t > 0");
    std::vector<cplx> terms;
    double largest = 0.0;
    for (int k = -window.k_max; k <= window.k_max; ++k) {
        const cplx phase = std::polar(1.0, k * (p.theta() - q.theta()) / cfg.sigma());
        for (int m = 0; m <= window.m_max; ++m) {
            const double lam = mode_data({k, m}, cfg).lambda;
            const double v = std::exp(-t * lam) * radial_factor({k, m}, p.r(), cfg) * radial_factor({k, m}, q.r(), cfg);
            largest = std::max(largest, std::abs(v));
            terms.push_back(v * phase);
        }
    }
    KernelValue out;
    out.value = pairwise_sum(std::span<const cplx>(terms)) / cfg.period();
    out.largest_term = largest / cfg.period();
    out.truncation.k_max = window.k_max;
    return out;
}

cplx b_integrand(double s, double theta, double t, const ConeConfig& cfg) {
    const double sg = cfg.sigma();
    const double a = cfg.alpha();
    const double tb = t * cfg.b0();
    const cplx x_plus = std::exp(cplx(s + tb, theta + kPi) / sg);
    const cplx x_minus = std::exp(cplx(s + tb, theta - kPi) / sg);
    return std::exp(s * a) * (std::polar(1.0, a * kPi) / (x_plus - 1.0) - std::polar(1.0, -a * kPi) / (x_minus - 1.0));
}

// ---------------------------------------------------------------- Schrodinger

namespace {

constexpr double kSnap = 1e-13;

// f(x) = 1/(1 - e^x) + 1/x, analytic at 0.
cplx bernoulli_f(cplx x) {
    const cplx x2 = x * x;
    return 0.5 + x * (-1.0 / 12.0 + x2 * (1.0 / 720.0 + x2 * (-1.0 / 30240.0 + x2 * (1.0 / 1209600.0 - x2 / 47900160.0))));
}

// T(psi, s) = e^{-alpha s}/(1 - e^{(i psi - s)/sigma}) + e^{alpha s}/(1 - e^{(i psi + s)/sigma}).
cplx pair_term(double psi, cplx s, const ConeConfig& cfg) {
    const double sg = cfg.sigma();
    const double a = cfg.alpha();
    const cplx ea = (kI * psi - s) / sg;
    const cplx eb = (kI * psi + s) / sg;
    if (std::abs(ea) < 0.1 && std::abs(eb) < 0.1) {
        // Both denominators vanish together; split off the Lorentzian part exactly.
        cplx sing;
        if (psi == 0.0) {
            sing = s == 0.0 ? cplx(-2.0 * sg * a) : -2.0 * sg * std::sinh(a * s) / s;
        } else {
            sing = 2.0 * sg * (kI * psi * std::cosh(a * s) - s * std::sinh(a * s)) / (psi * psi + s * s);
        }
        return std::exp(-a * s) * bernoulli_f(ea) + std::exp(a * s) * bernoulli_f(eb) + sing;
    }
    const cplx first = std::exp(-a * s) / (1.0 - std::exp(ea));
    cplx second;
    if (s.real() > 0.0) {
        second = -std::exp(a * s - eb) / (1.0 - std::exp(-eb));
    } else {
        second = std::exp(a * s) / (1.0 - std::exp(eb));
    }
    return first + second;
}

double snapped(double psi) { return std::abs(psi) < kSnap ? 0.0 : psi; }

}  // namespace

cplx a_integrand(cplx s, double delta, const ConeConfig& cfg) {
    const double period = cfg.period();
    const double a = cfg.alpha();
    const double psi_p = snapped(reduce_symmetric(delta + kPi, period));
    const double psi_m = snapped(reduce_symmetric(delta - kPi, period));
    return (std::polar(1.0, a * kPi) * pair_term(psi_p, s, cfg) - std::polar(1.0, -a * kPi) * pair_term(psi_m, s, cfg)) /
           (2.0 * kI);
}

std::vector<KernelValue> reduced_kernel_row(double rho, const std::vector<double>& deltas, const ConeConfig& cfg,
                                           const TruncationSpec& trunc) {
    trunc.validate();
    std::vector<KernelValue> out(deltas.size());
    for (auto& o : out) o.truncation = trunc;
    if (rho == 0.0) {
        for (auto& o : out) {
            o.value = 0.0;
            o.truncation.k_max = 0;
        }
        return out;
    }
    auto coef = [&](int k, double& big) -> cplx {
        const cplx v = bessel_i_imag(alpha_k(k, cfg), rho);
        big = std::abs(v);
        return v;
    };
    const double lr2 = std::log(0.5 * std::abs(rho));
    auto envelope = [&](int k) {
        const double ak = alpha_k(k, cfg);
        return std::exp(ak * lr2 - std::lgamma(ak + 1.0));
    };
    int k_used = 0;
    double largest = 0.0;
    const auto modes = collect_modes(coef, envelope, trunc.k_max, k_used, largest);
    for (std::size_t i = 0; i < deltas.size(); ++i) {
        out[i].value = angular_sum(modes, deltas[i], cfg.sigma());
        out[i].largest_term = largest;
        out[i].truncation.k_max = k_used;
    }
    return out;
}

KernelValue reduced_kernel(double rho, double delta, const ConeConfig& cfg, const TruncationSpec& trunc) {
    return reduced_kernel_row(rho, {delta}, cfg, trunc).front();
}

KernelValue reduced_kernel_closed(double rho, double delta, const ConeConfig& cfg, const TruncationSpec& trunc) {
    trunc.validate();
    KernelValue out;
    out.truncation = trunc;
    out.truncation.k_max = 0;
    const double sigma = cfg.sigma();
    const double alpha = cfg.alpha();
    const double period = cfg.period();
    auto opt = quad_options(trunc);

    // Image sum over |delta_j| <= pi; an image exactly on the boundary counts half.
    const double d0 = reduce_symmetric(delta, period);
    std::vector<cplx> img;
    for (int j = -2; j <= 2; ++j) {
        const double dj = d0 + period * j;
        const double gap = std::abs(dj) - kPi;
        if (gap > kSnap) continue;
        const double wgt = std::abs(gap) <= kSnap ? 0.5 : 1.0;
        const double dd = std::abs(gap) <= kSnap ? std::copysign(kPi, dj) : dj;
        img.push_back(wgt * std::polar(1.0, rho * std::cos(dd) - alpha * dd));
    }
    const cplx image_sum = sigma * pairwise_sum(std::span<const cplx>(img));
    opt.abs_tol = std::max(opt.abs_tol, 1e-15 * std::abs(image_sum));

    // Breakpoints resolving the near-pole of A at s = 0 when delta is close to +-pi mod 2 sigma pi.
    std::vector<double> breaks;
    for (double psi : {reduce_symmetric(delta + kPi, period), reduce_symmetric(delta - kPi, period)}) {
        const double w0 = sigma * std::abs(psi);
        if (w0 < kSnap) continue;
        for (double f = 0.0625; f < 1e4; f *= 4.0) breaks.push_back(w0 * f);
    }

    cplx integral = 0.0;
    const double decay = std::min(alpha, 1.0 / sigma - alpha);
    if (rho == 0.0) {
        const double s_end = std::min(trunc.s_max * 10.0, 45.0 / decay);
        auto f = [&](double s) { return a_integrand(s, delta, cfg); };
        const auto r = integrate(f, 0.0, s_end, opt, breaks);
        require_converged(r, "reduced_kernel_closed");
        integral = r.value;
    } else {
        const double ar = std::abs(rho);
        const double sg = rho > 0.0 ? 1.0 : -1.0;
        // Real segment [0, S], then rotate down (rho > 0) or up (rho < 0) by pi/2
        // where e^{-i rho cosh s} becomes e^{-|rho| sinh}.
        const double S = std::clamp(std::sqrt(40.0 / ar), 0.25, 1.0);
        auto f1 = [&](double s) { return std::polar(1.0, -rho * std::cosh(s)) * a_integrand(s, delta, cfg); };
        const auto r1 = integrate(f1, 0.0, S, opt, breaks);
        require_converged(r1, "reduced_kernel_closed");

        auto f2 = [&](double y) {
            const cplx s(S, -sg * y);
            return std::exp(-kI * rho * std::cosh(s)) * a_integrand(s, delta, cfg) * (-kI * sg);
        };
        const auto r2 = integrate(f2, 0.0, 0.5 * kPi, opt);
        require_converged(r2, "reduced_kernel_closed");

        const double v_end = std::max(std::asinh(45.0 / ar) - S, 1.0);
        auto f3 = [&](double v) {
            const cplx s(S + v, -sg * 0.5 * kPi);
            return std::exp(-ar * std::sinh(S + v)) * a_integrand(s, delta, cfg);
        };
        const auto r3 = integrate(f3, 0.0, v_end, opt);
        require_converged(r3, "reduced_kernel_closed");
        integral = r1.value + r2.value + r3.value;
    }
    out.value = image_sum - integral / kPi;
    double big = 0.0;
    for (const auto& v : img) big = std::max(big, sigma * std::abs(v));
    out.largest_term = std::max(big, std::abs(integral) / kPi);
    return out;
}

namespace {

struct SchrodingerGeometry {
    double rho, delta;
    cplx pref;  // i b0 e^{i t b0 alpha} / (4 pi sigma sin) * e^{b0 (r1^2+r2^2)/(4 i tan)}
};

SchrodingerGeometry schrodinger_geometry(double t, const ConePoint& p, const ConePoint& q, const ConeConfig& cfg) {
    if (!std::isfinite(t)) throw DomainError("time must be finite");
    const double tau = t * cfg.b0();
    const double sn = std::sin(tau);
    if (std::abs(sn) < 1e-6) throw SingularTimeError("|sin(t b0)| < 1e-6: the propagator kernel is singular");
    const double cs = std::cos(tau);
    SchrodingerGeometry g;
    g.rho = cfg.b0() * p.r() * q.r() / (2.0 * sn);
    g.delta = tau + angular_difference(p.theta(), q.theta(), cfg);
    const double gauss_phase = -cfg.b0() * (p.r() * p.r() + q.r() * q.r()) * cs / (4.0 * sn);
    g.pref = kI * cfg.b0() / (4.0 * kPi * cfg.sigma() * sn) * std::polar(1.0, tau * cfg.alpha() + gauss_phase);
    return g;
}

}  // namespace

KernelValue schrodinger_kernel_series(double t, const ConePoint& p, const ConePoint& q, const ConeConfig& cfg,
                                      const TruncationSpec& trunc) {
    const auto g = schrodinger_geometry(t, p, q, cfg);
    KernelValue k = reduced_kernel(g.rho, g.delta, cfg, trunc);
    k.value *= g.pref;
    k.largest_term *= std::abs(g.pref);
    return k;
}

KernelValue schrodinger_kernel_closed(double t, const ConePoint& p, const ConePoint& q, const ConeConfig& cfg,
                                      const TruncationSpec& trunc) {
    const auto g = schrodinger_geometry(t, p, q, cfg);
    KernelValue k = reduced_kernel_closed(g.rho, g.delta, cfg, trunc);
    k.value *= g.pref;
    k.largest_term *= std::abs(g.pref);
    return k;
}

// ---------------------------------------------------------------- half-wave

HalfwaveWindow halfwave_shell_window(int j, const ConeConfig& cfg, int k_min) {
    const double lam_hi = std::pow(4.0, j + 1);
    const double levels = (lam_hi / cfg.b0() - 1.0) / 2.0;
    HalfwaveWindow w;
    w.m_max = std::max(0, static_cast<int>(std::floor(levels)));
    w.k_max = std::max(0, static_cast<int>(std::ceil(cfg.sigma() * (levels - cfg.alpha()))));
    w.k_min = std::min(k_min, -1);
    return w;
}

namespace {

// Normalized radial factors of modes (k, m), m = 0..m_max, at one radius, from a single
// Laguerre recurrence in m.
void radial_column(double ak, int m_max, double r, const ConeConfig& cfg, const std::vector<double>& log_scale,
                   double* out) {
    const double u = 0.5 * cfg.b0() * r * r;
    const double base = ak * std::log(r) - 0.5 * u;
    double prev = 0.0;
    double cur = 1.0;
    for (int m = 0; m <= m_max; ++m) {
        if (m == 1) {
            prev = cur;
            cur = 1.0 + ak - u;
        } else if (m > 1) {
            const double next = ((2.0 * m - 1.0 + ak - u) * cur - (m - 1.0 + ak) * prev) / m;
            prev = cur;
            cur = next;
        }
        out[m] = std::exp(base + log_scale[m]) * cur;
    }
}

}  // namespace

HalfwaveKernel::HalfwaveKernel(int j, const ConeConfig& cfg, HalfwaveWindow window, std::vector<double> radii)
    : cfg_(cfg), window_(window), radii_(std::move(radii)) {
    const HalfwaveWindow need = halfwave_shell_window(j, cfg, -1);
    if (window_.m_max < need.m_max || window_.k_max < need.k_max || window_.k_min > -1) {
        throw WindowTooSmallError("half-wave window does not contain the dyadic shell of j = " + std::to_string(j));
    }
    build(j, false);
}

HalfwaveKernel::HalfwaveKernel(int j, const ConeConfig& cfg, std::vector<double> radii)
    : cfg_(cfg), window_(halfwave_shell_window(j, cfg, -1)), radii_(std::move(radii)) {
    build(j, true);
}

void HalfwaveKernel::build(int j, bool grow) {
    for (double r : radii_) {
        if (!(r >= 0.0)) throw DomainError("HalfwaveKernel: radii must be nonnegative");
    }
    const DyadicCutoff phi = make_cutoff();
    const double scale = std::ldexp(1.0, -j);
    const std::size_t nr = radii_.size();
    const int mm = window_.m_max;
    const double store_tol = 1e-16 * std::sqrt(cfg_.b0());

    struct Column {
        int k;
        std::vector<Mode> modes;
        std::vector<double> values;
    };
    std::vector<double> kept_max(nr, 0.0);
    std::vector<double> col(mm + 1);
    std::vector<double> table;
    std::vector<double> log_scale(mm + 1);

    // Radial table of the shell modes of one k; returns the per-radius maximum.
    auto tabulate = [&](int k, std::vector<int>& ms, std::vector<double>& w) {
        ms.clear();
        w.clear();
        for (int m = 0; m <= mm; ++m) {
            const double wt = phi(scale * std::sqrt(mode_data({k, m}, cfg_).lambda));
            if (wt > 0.0) {
                ms.push_back(m);
                w.push_back(wt);
            }
        }
        table.assign(ms.size() * nr, 0.0);
        if (ms.empty()) return;
        const double ak = std::abs(k / cfg_.sigma() + cfg_.alpha());
        const double log_b = std::log(2.0 / cfg_.b0());
        for (int m = 0; m <= mm; ++m) {
            const double lb = log_binomial(ak, m);
            const double log_norm = ak * log_b - std::log(cfg_.b0()) + std::lgamma(1.0 + ak) - lb;
            log_scale[m] = -lb - 0.5 * log_norm;
        }
        for (std::size_t i = 0; i < nr; ++i) {
            radial_column(ak, ms.back(), radii_[i], cfg_, log_scale, col.data());
            for (std::size_t a = 0; a < ms.size(); ++a) table[a * nr + i] = col[ms[a]];
        }
    };

    std::vector<Column> columns;
    std::vector<int> ms;
    std::vector<double> w;
    auto keep = [&](int k) {
        Column c{k, {}, {}};
        for (std::size_t a = 0; a < ms.size(); ++a) {
            const double* row = table.data() + a * nr;
            std::size_t lo = 0;
            while (lo < nr && std::abs(row[lo]) <= store_tol) ++lo;
            std::size_t hi = nr;
            while (hi > lo && std::abs(row[hi - 1]) <= store_tol) --hi;
            if (lo == hi) continue;
            for (std::size_t i = lo; i < hi; ++i) kept_max[i] = std::max(kept_max[i], std::abs(row[i]));
            const double lam = mode_data({k, ms[a]}, cfg_).lambda;
            c.modes.push_back({k, std::sqrt(lam), w[a], static_cast<int>(lo), static_cast<int>(hi),
                               static_cast<std::size_t>(c.values.size())});
            c.values.insert(c.values.end(), row + lo, row + hi);
        }
        columns.push_back(std::move(c));
    };
    // Negligible when below 1e-7 of the kept maximum at every radius.
    auto negligible = [&]() {
        for (std::size_t a = 0; a < ms.size(); ++a) {
            for (std::size_t i = 0; i < nr; ++i) {
                if (std::abs(table[a * nr + i]) > 1e-7 * kept_max[i]) return false;
            }
        }
        return true;
    };

    for (int k = window_.k_max; k >= window_.k_min; --k) {
        tabulate(k, ms, w);
        keep(k);
    }
    for (int k = window_.k_min - 1;; --k) {
        tabulate(k, ms, w);
        if (negligible()) break;
        if (!grow) {
            throw WindowTooSmallError("half-wave window: negative angular modes below k_min are not negligible");
        }
        keep(k);
        window_.k_min = k;
    }

    // Flatten in increasing k.
    std::reverse(columns.begin(), columns.end());
    k_begin_.assign(1, 0);
    for (auto& c : columns) {
        const std::size_t off = radial_.size();
        for (auto md : c.modes) {
            md.offset += off;
            modes_.push_back(md);
        }
        radial_.insert(radial_.end(), c.values.begin(), c.values.end());
        k_begin_.push_back(modes_.size());
    }
}

std::vector<cplx> HalfwaveKernel::phases(double t) const {
    std::vector<cplx> ph(modes_.size());
    for (std::size_t i = 0; i < modes_.size(); ++i) ph[i] = std::polar(modes_[i].weight, t * modes_[i].sqrt_lambda);
    return ph;
}

void HalfwaveKernel::angular_modes(const std::vector<cplx>& phase, std::size_t i1, std::size_t i2,
                                   std::vector<cplx>& g) const {
    const int nk = window_.k_max - window_.k_min + 1;
    g.assign(nk, 0.0);
    std::vector<cplx> terms;
    const int a = static_cast<int>(i1);
    const int b = static_cast<int>(i2);
    for (int ik = 0; ik < nk; ++ik) {
        terms.clear();
        for (std::size_t n = k_begin_[ik]; n < k_begin_[ik + 1]; ++n) {
            const Mode& md = modes_[n];
            if (a < md.lo || a >= md.hi || b < md.lo || b >= md.hi) continue;
            const double amp = radial_[md.offset + (a - md.lo)] * radial_[md.offset + (b - md.lo)];
            terms.push_back(amp * phase[n]);
        }
        g[ik] = pairwise_sum(std::span<const cplx>(terms));
    }
}

void HalfwaveKernel::angular_mode_row(const std::vector<cplx>& phase, std::size_t i1,
                                      std::vector<cplx>& rows) const {
    const int nk = window_.k_max - window_.k_min + 1;
    const std::size_t nr = radii_.size();
    // Accumulated per k in increasing m; the order is fixed, so results are reproducible.
    std::vector<double> re(nr * nk, 0.0), im(nr * nk, 0.0);
    const int a = static_cast<int>(i1);
    for (int ik = 0; ik < nk; ++ik) {
        double* gr = re.data() + static_cast<std::size_t>(ik) * nr;
        double* gi = im.data() + static_cast<std::size_t>(ik) * nr;
        for (std::size_t n = k_begin_[ik]; n < k_begin_[ik + 1]; ++n) {
            const Mode& md = modes_[n];
            if (a < md.lo || a >= md.hi) continue;
            const double* col = radial_.data() + md.offset;
            const cplx c = col[a - md.lo] * phase[n];
            const double cr = c.real();
            const double ci = c.imag();
            for (int b = md.lo; b < md.hi; ++b) {
                gr[b] += cr * col[b - md.lo];
                gi[b] += ci * col[b - md.lo];
            }
        }
    }
    rows.resize(nr * nk);
    for (int ik = 0; ik < nk; ++ik) {
        for (std::size_t b = 0; b < nr; ++b) {
            const std::size_t src = static_cast<std::size_t>(ik) * nr + b;
            rows[b * nk + ik] = cplx(re[src], im[src]);
        }
    }
}

std::vector<cplx> HalfwaveKernel::angular_modes(double t, std::size_t i1, std::size_t i2) const {
    std::vector<cplx> g;
    angular_modes(phases(t), i1, i2, g);
    return g;
}

cplx HalfwaveKernel::operator()(double t, std::size_t i1, std::size_t i2, double theta_diff) const {
    const auto g = angular_modes(t, i1, i2);
    std::vector<cplx> terms(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        const int k = window_.k_min + static_cast<int>(i);
        terms[i] = g[i] * std::polar(1.0, k * theta_diff / cfg_.sigma());
    }
    return pairwise_sum(std::span<const cplx>(terms)) / cfg_.period();
}

cplx halfwave_kernel_truncated(int j, double t, const ConePoint& p, const ConePoint& q, const ConeConfig& cfg,
                               const HalfwaveWindow& window) {
    HalfwaveKernel hk(j, cfg, window, {p.r(), q.r()});
    return hk(t, 0, 1, p.theta() - q.theta());
}

}  // namespace conemag
