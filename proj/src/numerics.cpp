#include "conemag/numerics.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>

#include "conemag/errors.hpp"
#include "conemag/geometry.hpp"

namespace conemag {

namespace {

template <class T>
T pairwise_impl(const T* p, std::size_t n) {
    if (n <= 32) {
        T s{};
        for (std::size_t i = 0; i < n; ++i) s += p[i];
        return s;
    }
    const std::size_t h = n / 2;
    return pairwise_impl(p, h) + pairwise_impl(p + h, n - h);
}

Rule build_gauss_legendre(int n) {
    Rule r;
    r.nodes.resize(n);
    r.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) p0 = 1.0;
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        // Re-evaluate the derivative at the converged node.
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        r.nodes[i] = -x;
        r.nodes[n - 1 - i] = x;
        r.weights[i] = w;
        r.weights[n - 1 - i] = w;
    }
    return r;
}

struct Panel {
    double a, b;
    cplx value;
    double l1;
    int depth;
};

}  // namespace

double pairwise_sum(std::span<const double> v) { return pairwise_impl(v.data(), v.size()); }
cplx pairwise_sum(std::span<const cplx> v) { return pairwise_impl(v.data(), v.size()); }

const Rule& gauss_legendre(int n) {
    static std::mutex mu;
    static std::map<int, std::unique_ptr<Rule>> cache;
    if (n < 1) throw QuadratureError("Gauss-Legendre order must be >= 1");
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[n];
    if (!slot) slot = std::make_unique<Rule>(build_gauss_legendre(n));
    return *slot;
}

LaguerreRule gauss_laguerre(int n, double a) {
    if (n < 1 || !(a > -1.0)) throw QuadratureError("gauss_laguerre: need n >= 1 and a > -1");
    // Golub-Welsch start, then Newton on the scaled recurrence for full relative accuracy.
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        J(i, i) = 2.0 * i + 1.0 + a;
        if (i + 1 < n) {
            const double off = std::sqrt((i + 1.0) * (i + 1.0 + a));
            J(i, i + 1) = off;
            J(i + 1, i) = off;
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J, Eigen::EigenvaluesOnly);
    LaguerreRule rule;
    rule.nodes.resize(n);
    rule.log_weights.resize(n);

    // Returns L_n(x), L_{n-1}(x) scaled by a common factor e^{-log_scale}.
    auto eval = [&](double x, double& ln, double& lnm1, double& log_scale) {
        double p0 = 1.0, p1 = 1.0 + a - x;
        log_scale = 0.0;
        if (n == 1) {
            ln = p1;
            lnm1 = p0;
            return;
        }
        for (int k = 1; k < n; ++k) {
            const double p2 = ((2.0 * k + 1.0 + a - x) * p1 - (k + a) * p0) / (k + 1.0);
            p0 = p1;
            p1 = p2;
            const double m = std::abs(p1);
            if (m > 1e100) {
                p0 /= m;
                p1 /= m;
                log_scale += std::log(m);
            }
        }
        ln = p1;
        lnm1 = p0;
    };

    const double lg = std::lgamma(n + a + 1.0) - std::lgamma(n + 1.0);
    for (int i = 0; i < n; ++i) {
        double x = es.eigenvalues()(i);
        double ln = 0, lnm1 = 0, ls = 0;
        for (int it = 0; it < 20; ++it) {
            eval(x, ln, lnm1, ls);
            const double d = (n * ln - (n + a) * lnm1) / x;  // scaled derivative
            const double dx = ln / d;
            x -= dx;
            if (std::abs(dx) <= 1e-15 * x) break;
        }
        eval(x, ln, lnm1, ls);
        const double d = (n * ln - (n + a) * lnm1) / x;
        // w = Gamma(n+a+1)/(n! x [L_n'(x)]^2)
        rule.nodes[i] = x;
        rule.log_weights[i] = lg - std::log(x) - 2.0 * (std::log(std::abs(d)) + ls);
    }
    return rule;
}

namespace {

struct PanelEval {
    cplx value;
    double l1;
};

template <class F>
PanelEval gauss_panel(const F& g, double a, double b, const Rule& rule) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    cplx s = 0.0;
    double l1 = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const cplx v = g(c + h * rule.nodes[i]);
        s += rule.weights[i] * v;
        l1 += rule.weights[i] * std::abs(v);
    }
    return {s * h, l1 * std::abs(h)};
}

template <class F>
IntegralResult adaptive(const F& g, double a, double b, const AdaptiveOptions& opt,
                        std::span<const double> breaks) {
    IntegralResult res{0.0, 0.0, 0.0, 0, true};
    if (a == b) return res;
    const Rule& rule = gauss_legendre(opt.order);
    std::vector<double> pts{a};
    for (double x : breaks) {
        if (x > a && x < b) pts.push_back(x);
    }
    pts.push_back(b);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

    std::vector<Panel> work;
    double l1_total = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const auto e = gauss_panel(g, pts[i], pts[i + 1], rule);
        work.push_back({pts[i], pts[i + 1], e.value, e.l1, 0});
        l1_total += e.l1;
    }
    std::vector<cplx> accepted;
    double err_total = 0.0;
    int panels = 0;
    while (!work.empty()) {
        Panel p = work.back();
        work.pop_back();
        const double mid = 0.5 * (p.a + p.b);
        const auto left = gauss_panel(g, p.a, mid, rule);
        const auto right = gauss_panel(g, mid, p.b, rule);
        const cplx refined = left.value + right.value;
        const double err = std::abs(refined - p.value);
        const double tol = std::max(opt.abs_tol, opt.rel_tol * l1_total);
        ++panels;
        if (err <= tol || p.depth >= opt.max_depth || panels > opt.max_panels) {
            if (err > tol) res.converged = false;
            accepted.push_back(refined);
            err_total += err;
            continue;
        }
        l1_total += left.l1 + right.l1 - p.l1;
        // Right half pushed first so panels are accepted left to right.
        work.push_back({mid, p.b, right.value, right.l1, p.depth + 1});
        work.push_back({p.a, mid, left.value, left.l1, p.depth + 1});
    }
    res.value = pairwise_sum(std::span<const cplx>(accepted));
    res.error_estimate = err_total;
    res.l1 = l1_total;
    res.panels = panels;
    return res;
}

}  // namespace

IntegralResult integrate(const ComplexFn& f, double a, double b, const AdaptiveOptions& opt,
                         std::span<const double> breaks) {
    if (a > b) {
        auto r = adaptive(f, b, a, opt, breaks);
        r.value = -r.value;
        return r;
    }
    return adaptive(f, a, b, opt, breaks);
}

IntegralResult integrate_path(const std::function<cplx(cplx)>& f, const std::function<cplx(double)>& z,
                              const std::function<cplx(double)>& dz, double a, double b,
                              const AdaptiveOptions& opt, std::span<const double> breaks) {
    auto g = [&](double x) { return f(z(x)) * dz(x); };
    return integrate(g, a, b, opt, breaks);
}

RadialRule log_radial_rule(double log_r_min, double log_r_max, double step) {
    if (!(step > 0.0) || !(log_r_max > log_r_min)) throw QuadratureError("log_radial_rule: bad range");
    RadialRule rr;
    const int n = static_cast<int>(std::ceil((log_r_max - log_r_min) / step));
    for (int i = 0; i <= n; ++i) {
        const double v = log_r_min + i * step;
        const double r = std::exp(v);
        rr.r.push_back(r);
        rr.w.push_back(step * r * r);  // r dr = r^2 dv
    }
    return rr;
}

}  // namespace conemag
