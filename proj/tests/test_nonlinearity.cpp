#include "frontlab/nonlinearity.hpp"

#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <random>

using namespace frontlab;

namespace {

Nonlinearity cubic(double a) { return Nonlinearity::make_builtin(NonlinearityKind::bistable, {{"a", a}}); }
Nonlinearity combustion(double th = 0.5) {
    return Nonlinearity::make_builtin(NonlinearityKind::combustion, {{"theta", th}});
}
Nonlinearity logistic() { return Nonlinearity::make_builtin(NonlinearityKind::monostable); }

}  // namespace

TEST_CASE("cubic unbalance integral matches the polynomial antiderivative") {
    const auto nl = cubic(0.25);
    CHECK(nl.primitive(1.0) == doctest::Approx(1.0 / 12.0 - 0.25 / 6.0).epsilon(1e-14));
    CHECK(nl.primitive(1.0) == doctest::Approx(1.0 / 24.0).epsilon(1e-14));
    CHECK(nl.theta() == 0.25);
}

TEST_CASE("balanced cubic is rejected") {
    CHECK_THROWS_AS(cubic(0.5), std::invalid_argument);
    CHECK_THROWS_AS(cubic(0.7), std::invalid_argument);
}

TEST_CASE("combustion vanishes below theta") {
    const auto nl = combustion();
    CHECK(nl(0.25) == 0.0);
    CHECK(nl(0.5) == 0.0);
    CHECK(nl(0.75) == doctest::Approx(0.25 * 0.25 * 0.25));
    CHECK(nl.f_prime(1.0) == doctest::Approx(-0.25));
}

TEST_CASE("class validation reports") {
    SUBCASE("logistic checked as bistable fails") {
        CHECK_FALSE(validate_class(logistic(), NonlinearityKind::bistable).passed());
    }
    SUBCASE("zero reaction checked as combustion fails") {
        const auto zero = Nonlinearity::make_custom(NonlinearityKind::combustion, [](double) { return 0.0; },
                                                    std::nullopt, 0.5, 2.0, false);
        CHECK_FALSE(validate_class(zero).passed());
    }
    SUBCASE("builtins pass at two grid resolutions") {
        for (const auto& nl : {combustion(), cubic(0.25), logistic()}) {
            CHECK(validate_class(nl, 1000).passed());
            CHECK(validate_class(nl, 10000).passed());
        }
    }
}

TEST_CASE("potential F") {
    const auto nl = cubic(0.25);
    CHECK(potential_F(nl, 0.0) == 0.0);
    const double v0 = (5.0 - std::sqrt(7.0)) / 6.0;
    CHECK(std::abs(potential_F(nl, v0)) < 1e-14);
    const auto cb = combustion();
    for (double u : {0.0, 0.1, 0.3, 0.5}) CHECK(potential_F(cb, u) == 0.0);
}

TEST_CASE("F' = -2 f at random points for every builtin") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> dist(0.01, 1.5);
    for (const auto& nl : {cubic(0.25), combustion(), logistic()}) {
        for (int k = 0; k < 50; ++k) {
            const double u = dist(rng);
            const double h = 1e-5;
            const double d = (potential_F(nl, u + h) - potential_F(nl, u - h)) / (2.0 * h);
            CHECK(std::abs(d + 2.0 * nl(u)) < 1e-8);
        }
    }
}

TEST_CASE("shifted potential G") {
    const auto nl = combustion();
    CHECK(shifted_potential_G(nl, 0.0) == 0.0);
    const double u = 0.25;
    CHECK(shifted_potential_G(nl, u) == doctest::Approx(2.0 * (0.5 * u * u * u / 3.0 - u * u * u * u / 4.0)).epsilon(1e-14));
    double prev = 0.0;
    double fmax = 0.0;
    for (int i = 1; i <= 100; ++i) fmax = std::max(fmax, nl(0.5 + 0.5 * i / 100.0));
    for (int i = 1; i < 100; ++i) {
        const double s = 0.5 * i / 100.0;
        const double g = shifted_potential_G(nl, s);
        CHECK(g > prev);
        CHECK(g <= 2.0 * s * fmax);
        prev = g;
    }
    CHECK_THROWS(shifted_potential_G(cubic(0.25), 0.1));
}

TEST_CASE("G is convex where f(. + theta) is nondecreasing") {
    const auto nl = combustion();
    const double w = nl.delta();
    REQUIRE(w > 0.0);
    const double h = w / 50.0;
    for (int i = 1; i < 49; ++i) {
        const double s = i * h;
        const double second = shifted_potential_G(nl, s + h) - 2.0 * shifted_potential_G(nl, s) + shifted_potential_G(nl, s - h);
        CHECK(second >= -1e-15);
    }
}

TEST_CASE("lambda0") {
    CHECK(lambda0(cubic(0.25)) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(lambda0(cubic(0.04)) == doctest::Approx(5.0).epsilon(1e-12));
    const auto nl = cubic(0.25);
    const double h = 1e-6;
    const double fd = (nl(h) - nl(-h)) / (2.0 * h);
    CHECK(1.0 / std::sqrt(-fd) == doctest::Approx(2.0).epsilon(1e-8));
    CHECK_THROWS(lambda0(combustion()));
}

TEST_CASE("tabulated term reproduces the sampled builtin") {
    const auto ref = cubic(0.25);
    std::vector<std::pair<double, double>> table;
    for (int i = 0; i <= 400; ++i) {
        const double u = 2.0 * i / 400.0;
        table.emplace_back(u, ref(u));
    }
    const auto tab = Nonlinearity::make_tabulated(NonlinearityKind::bistable, table, 0.25, 2.0);
    for (double u : {0.1, 0.33, 0.7, 1.2}) CHECK(tab(u) == doctest::Approx(ref(u)).epsilon(1e-4));
    CHECK(tab.primitive(1.0) == doctest::Approx(1.0 / 24.0).epsilon(1e-5));
}
