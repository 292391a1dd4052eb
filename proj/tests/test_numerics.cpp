#include "frontlab/numerics.hpp"

#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

using namespace frontlab;

TEST_CASE("Gauss-Legendre integrates polynomials and smooth functions") {
    CHECK(gauss_legendre_integrate([](double x) { return x * x * x * x; }, 0.0, 2.0, 5) ==
          doctest::Approx(32.0 / 5.0).epsilon(1e-14));
    CHECK(gauss_legendre_integrate([](double x) { return std::exp(x); }, 0.0, 1.0) ==
          doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-14));
}

TEST_CASE("tridiagonal solve matches a dense residual") {
    const int n = 50;
    std::vector<double> lo(n, -1.0), di(n, 2.5), up(n, -1.2), rhs(n), x(n);
    for (int i = 0; i < n; ++i) rhs[i] = std::sin(0.3 * i);
    std::vector<double> b = rhs;
    solve_tridiagonal(lo, di, up, rhs);
    for (int i = 0; i < n; ++i) {
        double r = di[i] * rhs[i];
        if (i > 0) r += lo[i] * rhs[i - 1];
        if (i + 1 < n) r += up[i] * rhs[i + 1];
        CHECK(std::abs(r - b[i]) < 1e-13);
    }
}

TEST_CASE("line fit recovers exact data") {
    std::vector<double> xs, ys;
    for (int i = 0; i < 20; ++i) {
        xs.push_back(i);
        ys.push_back(3.0 * i - 1.0);
    }
    const LineFit f = fit_line(xs, ys);
    CHECK(f.slope == doctest::Approx(3.0));
    CHECK(f.intercept == doctest::Approx(-1.0));
    CHECK(f.rms < 1e-12);
}

TEST_CASE("quintic Hermite sampler is exact for quintics") {
    auto p = [](double x) { return x * x * x * x * x - 2 * x * x + 1; };
    auto dp = [](double x) { return 5 * x * x * x * x - 4 * x; };
    auto ddp = [](double x) { return 20 * x * x * x - 4; };
    std::vector<double> xs, ys, ds, cs;
    for (int i = 0; i <= 4; ++i) {
        const double x = 0.5 * i;
        xs.push_back(x);
        ys.push_back(p(x));
        ds.push_back(dp(x));
        cs.push_back(ddp(x));
    }
    const HermiteSampler s(xs, ys, ds, cs);
    for (double x : {0.13, 0.77, 1.51, 1.99}) {
        CHECK(s(x) == doctest::Approx(p(x)).epsilon(1e-12));
        CHECK(s.derivative(x) == doctest::Approx(dp(x)).epsilon(1e-11));
    }
}
