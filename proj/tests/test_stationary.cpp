#include "frontlab/stationary.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <random>
#include <vector>

using namespace frontlab;

namespace {

const Nonlinearity& cubic() {
    static const Nonlinearity nl = Nonlinearity::make_builtin(NonlinearityKind::bistable, {{"a", 0.25}});
    return nl;
}

const GroundState& gs() {
    static const GroundState g = ground_state(cubic());
    return g;
}

const Nonlinearity& combustion() {
    static const Nonlinearity nl = Nonlinearity::make_builtin(NonlinearityKind::combustion, {{"theta", 0.5}});
    return nl;
}

const double v0_exact = (5.0 - std::sqrt(7.0)) / 6.0;
const double v1_exact = (5.0 + std::sqrt(7.0)) / 6.0;

/// F for the a = 0.25 cubic in factored form, with d = v0 - v supplied separately.
double F_factored(double v, double d) { return 0.5 * v * v * d * (v1_exact - v); }


double x_of_oracle(double level) {
    boost::math::quadrature::tanh_sinh<double> q;
    return q.integrate(
        [](double s, double sc) { return 1.0 / std::sqrt(F_factored(s, oracle::dist_right(v0_exact, s, sc))); }, level,
        v0_exact);
}

std::vector<double> geometric(double a, double b, double r) {
    std::vector<double> out;
    for (double t = a; t <= b; t *= r) out.push_back(t);
    return out;
}

std::vector<double> fractions(int n) {
    std::vector<double> out;
    for (int i = 0; i <= n; ++i) out.push_back(static_cast<double>(i) / n);
    return out;
}

}  // namespace

TEST_CASE("ground state constants") {
    CHECK(gs().v0 == doctest::Approx((5.0 - std::sqrt(7.0)) / 6.0).epsilon(1e-12));
    CHECK(gs().lambda0 == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(gs().V(0.0) == doctest::Approx(gs().v0).epsilon(1e-12));
    boost::math::quadrature::tanh_sinh<double> q;
    const double A0 = q.integrate(
        [](double s, double sc) {
            return (1.0 / std::sqrt(0.5 * oracle::dist_right(v0_exact, s, sc) * (v1_exact - s)) - 2.0) / s;
        },
        0.0, v0_exact);
    CHECK(gs().A0 == doctest::Approx(A0).epsilon(1e-8));
    CHECK(gs().A == doctest::Approx(gs().v0 * std::exp(A0 / 2.0)).epsilon(1e-8));
    CHECK_THROWS_AS(ground_state(combustion()), std::domain_error);
}

TEST_CASE("profile agrees with an independent level quadrature") {
    for (int i = 1; i <= 20; ++i) {
        const double level = gs().v0 * i / 21.0;
        const double x = x_of_oracle(level);
        CHECK(gs().x_of(level) == doctest::Approx(x).epsilon(1e-9));
        CHECK(std::abs(gs().V(x) - level) < 1e-8);
    }
}

TEST_CASE("energy identity and monotone decay") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 40.0);
    for (int k = 0; k < 100; ++k) {
        const double x = u(rng);
        const double h = 1e-4;
        const double d = (gs().V(x + h) - gs().V(x - h)) / (2.0 * h);
        CHECK(std::abs(d * d - potential_F(cubic(), gs().V(x))) < 1e-8);
    }
    double prev = gs().V(0.0);
    for (int i = 1; i <= 400; ++i) {
        const double v = gs().V(0.15 * i);
        CHECK(v < prev);
        prev = v;
    }
}

TEST_CASE("exponential tail") {
    const double l0 = gs().lambda0;
    CHECK(gs().V(20 * l0) * std::exp(20.0) == doctest::Approx(gs().A).epsilon(0.01));
    double lo = 1e300, hi = -1e300;
    for (int i = 0; i <= 100; ++i) {
        const double x = l0 * (15.0 + 10.0 * i / 100.0);
        const double v = std::log(gs().V(x)) + x / l0;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    CHECK(hi - lo < 1e-3);
}

TEST_CASE("level curve xi_m") {
    const double m = 1.0;
    CHECK(xi_m(gs(), m, 2.0 * m / gs().v0) == doctest::Approx(gs().x_of(gs().v0 / 2.0)).epsilon(1e-10));
    CHECK_THROWS(xi_m(gs(), m, 0.5 * m / gs().v0));
    const double t = 1e6;
    const double l0 = gs().lambda0;
    CHECK(xi_m(gs(), m, t) - l0 * std::log(t) == doctest::Approx(l0 * std::log(gs().A / m)).epsilon(0.02));
    const double dt = 1e3;
    const double slope = (xi_m(gs(), m, t + dt) - xi_m(gs(), m, t - dt)) / (2.0 * dt);
    CHECK(slope * t / l0 == doctest::Approx(1.0).epsilon(0.02));
    CHECK(xi_m_prime(gs(), m, t) == doctest::Approx(slope).epsilon(1e-5));
    double prev = 0.0;
    for (double tt : geometric(10.0, 1e7, 3.0)) {
        const double xi = xi_m(gs(), m, tt);
        CHECK(xi > prev);
        CHECK(xi_m(gs(), 0.5 * m, tt) > xi);
        prev = xi;
    }
}

TEST_CASE("barrier rho") {
    const double rho = barrier_rho(cubic());
    REQUIRE(rho > 0.0);
    REQUIRE(rho < cubic().theta());
    for (int i = 1; i < 100; ++i) {
        const double u = rho * i / 100.0;
        CHECK(cubic()(u) < 0.0);
        CHECK(cubic().f_prime(u) < 0.5 * cubic().f_prime(0.0));
    }
}

TEST_CASE("bump profiles") {
    boost::math::quadrature::tanh_sinh<double> q;
    double prev_l = 0.0;
    for (double b : {0.05, 1e-2, 1e-3, 1e-4}) {
        const BumpProfile bp = bump(combustion(), b);
        const double l = oracle::bump_l(b);
        CHECK(shifted_potential_G(combustion(), b) == doctest::Approx(oracle::G_gap(b, 0.0, b)).epsilon(1e-13));
        CHECK(bp.l == doctest::Approx(l).epsilon(1e-8));
        CHECK(bp.V(0.0) == doctest::Approx(0.5 + b).epsilon(1e-12));
        CHECK(bp.V(bp.l) == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(std::abs(bp.V(bp.L)) < 1e-12);
        CHECK(bp.slope == doctest::Approx(-std::sqrt(shifted_potential_G(combustion(), b))).epsilon(1e-12));
        CHECK(bp.L == doctest::Approx(bp.l + 0.5 / std::sqrt(shifted_potential_G(combustion(), b))).epsilon(1e-12));
        const double mid = 0.5 * (bp.l + bp.L);
        CHECK(bp.V(mid) == doctest::Approx(0.5 + bp.slope * (mid - bp.l)).epsilon(1e-12));
        CHECK(bp.l * std::abs(bp.slope) < 2.0 * b);
        CHECK(bp.l / bp.L < 2.0 * b / 0.5);
        CHECK(bp.l > prev_l);
        prev_l = bp.l;
        for (int i = 0; i <= 100; ++i) {
            const double x = bp.l * i / 100.0;
            const double d = bp.V_prime(x);
            CHECK(std::abs(d * d - shifted_potential_gap(combustion(), b, bp.V(x) - 0.5)) < 1e-8);
        }
    }
    CHECK_THROWS_AS(bump(combustion(), 0.3), std::domain_error);
    CHECK_THROWS_AS(bump(cubic(), 0.01), std::domain_error);
}

TEST_CASE("barrier residual signs") {
    const double l2 = gs().lambda0 * gs().lambda0;
    const auto tg = geometric(10.0, 1e8, 1.5);
    const auto xg = fractions(20);
    const ResidualReport good = barrier_residuals(gs(), 1.0, 2.0 * l2, 0.25 * l2, tg, xg);
    CHECK(good.passed());
    CHECK(std::isfinite(good.onset));
    REQUIRE(good.find("upper_kink") != nullptr);
    CHECK(good.find("upper_kink")->passed);
    const ResidualReport bad = barrier_residuals(gs(), 1.0, 0.5 * l2, 0.25 * l2, tg, xg);
    REQUIRE(bad.find("lower_front") != nullptr);
    CHECK_FALSE(bad.find("lower_front")->passed);
    CHECK_FALSE(bad.passed());
    CHECK(bad.to_text().find("lower_front") != std::string::npos);
}
