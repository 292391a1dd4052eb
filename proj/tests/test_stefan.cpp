#include "frontlab/stefan.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <random>
#include <vector>

using namespace frontlab;

TEST_CASE("erf_scaled basics") {
    CHECK(erf_scaled(0.0) == 0.0);
    CHECK(erf_scaled(40.0) == 1.0);
    CHECK(erf_scaled(0.5) < erf_scaled(1.0));
    CHECK(erf_scaled(0.7) == doctest::Approx(2.0 / std::sqrt(M_PI) * oracle::gauss_integral(0.7)).epsilon(1e-13));
}

TEST_CASE("xi0 for mu theta = 0.5 agrees with an independent quadrature bisection") {
    const double xi = solve_xi0(1.0, 0.5);
    CHECK(xi == doctest::Approx(oracle::xi0(0.5)).epsilon(1e-10));
    CHECK(solve_xi0(1.0, 0.6) > xi);
    CHECK_THROWS(solve_xi0(1.0, 0.0));
    CHECK_THROWS(solve_xi0(-1.0, 0.5));
}

TEST_CASE("xi0 small-argument law") {
    const double xi = solve_xi0(1.0, 0.02);
    CHECK(std::abs(xi / std::sqrt(0.01) - 1.0) < 0.02);
}

TEST_CASE("xi0 defect over random parameters") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> mu(0.1, 10.0), th(0.1, 0.9);
    for (int k = 0; k < 50; ++k) {
        const double m = mu(rng), t = th(rng);
        CHECK(std::abs(xi0_equation_lhs(solve_xi0(m, t)) - m * t) <= 1e-12 * std::max(1.0, m * t));
    }
}

TEST_CASE("exact Stefan profile") {
    const StefanExact se(1.0, 0.5);
    for (double t : {0.5, 1.0, 7.0}) {
        CHECK(se.phi(t, 0.0).value == doctest::Approx(0.5));
        CHECK(std::abs(se.phi(t, se.rho(t)).value) < 1e-15);
        CHECK(se.phi(t, 1.1 * se.rho(t)).beyond_front);
        double prev = se.phi(t, 0.0).value;
        for (int i = 1; i <= 50; ++i) {
            const double v = se.phi(t, se.rho(t) * i / 50.0).value;
            CHECK(v < prev);
            prev = v;
        }
    }
    CHECK(-se.mu() * se.phi_x(1.0, se.rho(1.0)) == doctest::Approx(se.rho_prime(1.0)).epsilon(1e-10));
    CHECK(se.rho_prime(1.0) == doctest::Approx(se.xi0()).epsilon(1e-12));
}

TEST_CASE("heat residual vanishes and finite differences agree to second order") {
    const StefanExact se(1.0, 0.5);
    const std::vector<double> ts = {0.5, 1.0, 3.0, 10.0};
    const std::vector<double> xs = {0.1, 0.3, 0.5, 0.7, 0.9};
    CHECK(verify_heat_residual(se, ts, xs) <= 1e-12);
    const double x = 0.5 * se.rho(1.0);
    auto fd = [&](double h) {
        const double pt = (se.phi(1.0 + h, x).value - se.phi(1.0 - h, x).value) / (2 * h);
        const double pxx = (se.phi(1.0, x + h).value - 2 * se.phi(1.0, x).value + se.phi(1.0, x - h).value) / (h * h);
        return std::abs(pt - pxx);
    };
    const double r1 = fd(1e-2), r2 = fd(5e-3);
    CHECK(r1 / r2 == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("self-similarity") {
    const StefanExact se(1.3, 0.4);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 20; ++k) {
        const double t = 0.2 + 3 * u(rng);
        const double x = u(rng) * se.rho(t);
        for (double lam : {2.0, 5.0}) {
            CHECK(se.phi(lam * lam * t, lam * x).value == doctest::Approx(se.phi(t, x).value).epsilon(1e-14));
        }
    }
}
