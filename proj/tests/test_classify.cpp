#include "frontlab/classify.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

using namespace frontlab;

namespace {

Nonlinearity cubic() { return Nonlinearity::make_builtin(NonlinearityKind::bistable, {{"a", 0.25}}); }
Nonlinearity logistic() { return Nonlinearity::make_builtin(NonlinearityKind::monostable); }

FrontState state_from(const std::function<double(double)>& u, double g, double h, int n = 200) {
    FrontState s;
    s.g = g;
    s.h = h;
    s.values.resize(n + 1);
    for (int j = 0; j <= n; ++j) s.values[j] = u(s.x_at(j));
    s.values.front() = 0.0;
    s.values.back() = 0.0;
    return s;
}

Trajectory synthetic(const std::function<double(double)>& h, double t0, double t1, int n) {
    Trajectory tr;
    for (int i = 0; i <= n; ++i) {
        const double t = t0 + (t1 - t0) * i / n;
        tr.samples.push_back({t, -h(t), h(t), 0, 0, 1, 1});
    }
    return tr;
}

SolverConfig solver(int n) {
    SolverConfig c;
    c.nodes = n;
    return c;
}

}  // namespace

TEST_CASE("verdicts on hand-built states") {
    const auto nl = cubic();
    const double h0 = 2.0;
    const auto small = state_from([](double x) { return 0.1 * std::cos(std::numbers::pi * x / 4.0); }, -2, 2);
    CHECK(classify_state(small, nl, h0) == Verdict::vanishing);

    const auto mid = state_from([](double x) { return 0.6 * std::cos(std::numbers::pi * x / 4.0); }, -2, 2);
    CHECK_FALSE(classify_state(mid, nl, h0).has_value());

    const auto wide = state_from([](double x) { return std::min(1.0, 30.0 - std::abs(x)); }, -30, 30);
    CHECK(classify_state(wide, nl, h0) == Verdict::spreading);

    const auto near = state_from([](double x) { return std::min(1.0, 3.0 - std::abs(x)); }, -3, 3);
    CHECK_FALSE(classify_state(near, nl, h0).has_value());
}

TEST_CASE("monostable verdict uses the critical span") {
    const auto nl = logistic();
    const auto narrow = state_from([](double x) { return 0.5 * (1.0 - x * x); }, -1, 1);
    CHECK_FALSE(classify_state(narrow, nl, 1.0).has_value());
    const auto wide = state_from([](double x) { return 0.5 * (1.0 - x * x / 4.0); }, -2, 2);
    CHECK(classify_state(wide, nl, 2.0) == Verdict::spreading);
    const auto faint = state_from([](double x) { return 1e-4 * (1.0 - x * x); }, -1, 1);
    CHECK(classify_state(faint, nl, 1.0) == Verdict::vanishing);
    const auto edge = state_from([](double x) { return 9e-4 * std::cos(std::numbers::pi * x / 3.1); }, -1.55, 1.55);
    CHECK_FALSE(classify_state(edge, nl, 1.55).has_value());
}

TEST_CASE("classified runs for clear cases") {
    const FreeBoundarySolver s(cubic(), solver(200));
    const auto lo = classify_run(s, s.init([](double x) { return 0.2 * std::cos(std::numbers::pi * x / 7.0); }, 3.5), 500);
    CHECK(lo.report.verdict == Verdict::vanishing);
    REQUIRE(lo.report.decided_at.has_value());
    const auto hi = classify_run(s, s.init([](double x) { return 1.5 * std::cos(std::numbers::pi * x / 7.0); }, 3.5), 500);
    CHECK(hi.report.verdict == Verdict::spreading);
    CHECK(hi.report.evidence.h > 3.5);
}

TEST_CASE("sigma star for the bistable cubic") {
    const auto phi = [](double x) { return std::cos(std::numbers::pi * x / 7.0); };
    SigmaStarOptions opt;
    opt.tol = 1e-4;
    opt.t_cap = 2000;
    const auto r = sigma_star(phi, 3.5, cubic(), solver(200), opt);
    REQUIRE(r.bracketed);
    CHECK(r.converged);
    CHECK(r.hi / r.lo - 1.0 <= 1e-4);
    CHECK(r.lo == doctest::Approx(0.7492).epsilon(0.02));
    for (const auto& p : r.probes) {
        if (p.sigma <= r.lo) CHECK(p.verdict != Verdict::spreading);
        if (p.sigma >= r.hi) CHECK(p.verdict != Verdict::vanishing);
    }
}

TEST_CASE("sigma star fails to bracket when every amplitude spreads") {
    const auto phi = [](double x) { return std::cos(std::numbers::pi * x / 6.0); };
    SigmaStarOptions opt;
    opt.max_doublings = 8;
    opt.t_cap = 200;
    const auto r = sigma_star(phi, 3.0, logistic(), solver(128), opt);
    CHECK_FALSE(r.bracketed);
    CHECK_FALSE(r.failure.empty());
}

TEST_CASE("speed fits recover synthetic laws") {
    const auto lin = fit_speed(synthetic([](double t) { return 2.0 * t + 1.0; }, 0, 100, 1000), SpeedLaw::linear, {10, 100});
    CHECK(lin.coefficient == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(lin.offset == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(lin.rms < 1e-10);
    const auto lg = fit_speed(synthetic([](double t) { return 2.0 * std::log(t) + 3.0; }, 1, 1000, 2000), SpeedLaw::log, {10, 1000});
    CHECK(lg.coefficient == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(lg.offset == doctest::Approx(3.0).epsilon(1e-10));
    const auto sq = fit_speed(synthetic([](double t) { return 1.5 * std::sqrt(t); }, 0, 900, 2000), SpeedLaw::sqrt, {100, 900});
    CHECK(sq.coefficient == doctest::Approx(1.5).epsilon(1e-12));
    CHECK_THROWS_AS(fit_speed(synthetic([](double t) { return t; }, 0, 10, 100), SpeedLaw::linear, {0, 10}),
                    std::invalid_argument);
    CHECK(speed_law_from_string("sqrt") == SpeedLaw::sqrt);
    CHECK_THROWS(speed_law_from_string("cubic"));
}

TEST_CASE("divergence window") {
    const auto hi = synthetic([](double t) { return 10.0 + t; }, 0, 1000, 10000);
    const auto lo = synthetic([](double t) { return 10.0 + t - 1e-4 * t * t; }, 0, 1000, 10000);
    const auto w = divergence_window(lo, hi, 0.01);
    const double exact = (0.01 + std::sqrt(1e-4 + 4e-4 * 0.1)) / 2e-4;
    CHECK(w.t_b <= exact);
    CHECK(w.t_b > exact - 0.2);
    CHECK(w.t_a == doctest::Approx(std::max(10.0, w.t_b / 10.0)));
}

TEST_CASE("shift fit recovers a translated ground state") {
    const auto nl = cubic();
    const GroundState gs = ground_state(nl);
    const auto st = state_from([&](double x) { return gs.V(x + 0.3); }, -20, 20, 800);
    CHECK(fit_shift(st, gs) == doctest::Approx(0.3).epsilon(1e-4));
}
