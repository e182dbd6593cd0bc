#include <doctest.h>

#include <cmath>
#include <vector>

#include "conemag/geometry.hpp"
#include "conemag/numerics.hpp"

using namespace conemag;

TEST_CASE("pairwise sum is exact on representable data and order-stable") {
    std::vector<double> v;
    for (int i = 1; i <= 1000; ++i) v.push_back(i);
    CHECK(pairwise_sum(v) == 500500.0);
    std::vector<double> tiny(1 << 16, 0.1);
    CHECK(std::abs(pairwise_sum(tiny) - 6553.6) < 1e-9);
}

TEST_CASE("Gauss-Legendre integrates polynomials of degree 2n-1 exactly") {
    for (int n : {4, 16}) {
        const Rule& r = gauss_legendre(n);
        for (int d = 0; d <= 2 * n - 1; ++d) {
            double s = 0.0;
            for (int i = 0; i < n; ++i) s += r.weights[i] * std::pow(r.nodes[i], d);
            const double exact = d % 2 ? 0.0 : 2.0 / (d + 1);
            CHECK(s == doctest::Approx(exact).epsilon(1e-13));
        }
    }
}

TEST_CASE("Gauss-Laguerre moments are Gamma values") {
    const double a = 0.4;
    const LaguerreRule r = gauss_laguerre(20, a);
    for (int p = 0; p < 30; ++p) {
        double s = 0.0;
        for (std::size_t i = 0; i < r.nodes.size(); ++i) s += std::exp(r.log_weights[i]) * std::pow(r.nodes[i], p);
        CHECK(s == doctest::Approx(std::tgamma(a + p + 1)).epsilon(1e-11));
    }
}

TEST_CASE("adaptive integration") {
    const auto a = integrate([](double x) { return cplx(std::sqrt(x), 0.0); }, 0.0, 1.0);
    CHECK(a.converged);
    CHECK(a.value.real() == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    const auto b = integrate([](double x) { return std::exp(cplx(0.0, x)); }, 0.0, 30.0);
    CHECK(std::abs(b.value - cplx(std::sin(30.0), 1.0 - std::cos(30.0))) < 1e-12);
    // |x - 1| has a kink; a breakpoint makes it exact
    const double br[] = {1.0};
    const auto c = integrate([](double x) { return cplx(std::abs(x - 1.0), 0.0); }, 0.0, 3.0, {}, br);
    CHECK(c.value.real() == doctest::Approx(2.5).epsilon(1e-14));
}

TEST_CASE("contour integration of an entire function") {
    // int over the segment from 0 to 1 + i of e^z equals e^{1+i} - 1
    const auto r = integrate_path([](cplx z) { return std::exp(z); }, [](double x) { return cplx(x, x); },
                                  [](double) { return cplx(1.0, 1.0); }, 0.0, 1.0);
    CHECK(std::abs(r.value - (std::exp(cplx(1.0, 1.0)) - 1.0)) < 1e-13);
}

TEST_CASE("log-radial rule") {
    const RadialRule r = log_radial_rule(std::log(1e-8), std::log(8.0), 0.05);
    double g = 0.0, p = 0.0;
    for (std::size_t i = 0; i < r.r.size(); ++i) {
        g += r.w[i] * std::exp(-r.r[i] * r.r[i]);
        p += r.w[i] * std::pow(r.r[i], 0.5) * std::exp(-r.r[i] * r.r[i]);
    }
    CHECK(g == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(p == doctest::Approx(0.5 * std::tgamma(1.25)).epsilon(1e-12));
}
