#include "frontlab/fb_solver.hpp"
#include "frontlab/stefan.hpp"

#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <numbers>

using namespace frontlab;

namespace {

Nonlinearity zero_reaction(double theta = 0.5) {
    return Nonlinearity::make_custom(NonlinearityKind::combustion, [](double) { return 0.0; },
                                     [](double) { return 0.0; }, theta, 2.0, false);
}

Nonlinearity cubic() { return Nonlinearity::make_builtin(NonlinearityKind::bistable, {{"a", 0.25}}); }

SolverConfig config(int n, FrontMode mode = FrontMode::two_front) {
    SolverConfig c;
    c.nodes = n;
    c.mode = mode;
    return c;
}

}  // namespace

TEST_CASE("init samples admissible data") {
    const FreeBoundarySolver s(cubic(), config(128));
    const double h0 = 1.0;
    const auto st = s.init([](double x) { return 0.5 * std::cos(std::numbers::pi * x / 2.0); }, h0);
    CHECK(st.values[64] == doctest::Approx(0.5));
    CHECK(st.max_u() == doctest::Approx(0.5));
    CHECK(st.g == -1.0);
    CHECK(st.h == 1.0);

    const auto par = s.init([](double x) { return 1.0 - x * x; }, 1.0);
    for (int j = 0; j <= 128; ++j) {
        const double x = par.x_at(j);
        CHECK(par.values[j] == doctest::Approx(1.0 - x * x).epsilon(1e-15));
    }
}

TEST_CASE("init rejects data outside the admissible class") {
    const FreeBoundarySolver s(cubic(), config(128));
    CHECK_THROWS_AS(s.init([](double x) { return 0.1 + 0.0 * x; }, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(s.init([](double x) { return (1.0 - x * x) * (1.0 - x * x); }, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(s.init([](double) { return 0.0; }, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(s.init([](double x) { return 1.0 - x * x; }, -1.0), std::invalid_argument);
}

TEST_CASE("config validation names the field") {
    SolverConfig c;
    c.nodes = 10;
    CHECK_THROWS_WITH(c.validate(), doctest::Contains("solver.nodes"));
    c = SolverConfig{};
    c.mu = -1.0;
    CHECK_THROWS_WITH(c.validate(), doctest::Contains("solver.mu"));
}

TEST_CASE("frozen fronts reproduce the heat eigenmode decay") {
    SolverConfig c = config(400);
    c.mu = 0.0;
    c.dt_rule = TimeStepRule::fixed(2.5e-4);
    const FreeBoundarySolver s(zero_reaction(), c);
    const auto st = s.init([](double x) { return std::sin(std::numbers::pi * (x + 1.0) / 2.0); }, 1.0);
    const Trajectory tr = s.run(st, StopRule::at_time(0.1));
    const double k = std::numbers::pi / 2.0;
    CHECK(tr.last().t == doctest::Approx(0.1));
    CHECK(std::abs(tr.last().u_center - std::exp(-k * k * 0.1)) < 1e-4);
    CHECK(tr.last().h == 1.0);
}

TEST_CASE("even data keeps g = -h in two-front mode") {
    const FreeBoundarySolver s(cubic(), config(200));
    const auto st = s.init([](double x) { return 0.9 * std::cos(std::numbers::pi * x / 6.0); }, 3.0);
    const Trajectory tr = s.run(st, StopRule::at_time(20.0));
    for (const auto& smp : tr.samples) CHECK(std::abs(smp.h + smp.g) <= 1e-10 * (1.0 + smp.h));
}

TEST_CASE("accepted steps move fronts outward") {
    const FreeBoundarySolver s(cubic(), config(128));
    auto st = s.init([](double x) { return 0.8 * (1.0 - x * x / 4.0) * (1.0 + 0.3 * x / 2.0); }, 2.0);
    for (int i = 0; i < 300; ++i) {
        const auto next = s.step(st);
        CHECK(next.h >= st.h);
        CHECK(next.g <= st.g);
        CHECK(next.t > st.t);
        st = next;
    }
}

TEST_CASE("boundary flux stencils") {
    SUBCASE("linear profile is exact for the second-order stencil") {
        SolverConfig c = config(64, FrontMode::pinned_left);
        c.pinned_value = 1.4;
        const FreeBoundarySolver s(zero_reaction(), c);
        FrontState st;
        st.mode = FrontMode::pinned_left;
        st.h = 2.0;
        st.values.resize(65);
        for (int j = 0; j <= 64; ++j) st.values[j] = 0.7 * (st.h - st.x_at(j));
        CHECK(s.boundary_flux(st).second == doctest::Approx(-0.7).epsilon(1e-14));
    }
    SUBCASE("symmetric state gives opposite slopes") {
        const FreeBoundarySolver s(cubic(), config(128));
        const auto st = s.init([](double x) { return 1.0 - x * x; }, 1.0);
        const auto [gl, gr] = s.boundary_flux(st);
        CHECK(gl == doctest::Approx(-gr).epsilon(1e-13));
        CHECK(gr == doctest::Approx(-2.0).epsilon(1e-12));
    }
    SUBCASE("exact Stefan slope converges at second order") {
        const StefanExact se(1.0, 0.5);
        double errs[2];
        int k = 0;
        for (int n : {200, 400}) {
            SolverConfig c = config(n, FrontMode::pinned_left);
            c.pinned_value = 0.5;
            const FreeBoundarySolver s(zero_reaction(), c);
            const auto st = s.init([&](double x) { return std::max(0.0, se.phi(1.0, x).value); }, se.rho(1.0), 1.0);
            errs[k++] = std::abs(s.boundary_flux(st).second - se.phi_x(1.0, se.rho(1.0)));
        }
        CHECK(errs[0] / errs[1] == doctest::Approx(4.0).epsilon(0.05));
    }
}

TEST_CASE("zero end time gives the initial sample only") {
    const FreeBoundarySolver s(cubic(), config(128));
    const auto st = s.init([](double x) { return 1.0 - x * x; }, 1.0);
    const Trajectory tr = s.run(st, StopRule::at_time(0.0));
    CHECK(tr.samples.size() == 1);
    CHECK(tr.samples.front().t == 0.0);
}

TEST_CASE("runs are deterministic") {
    const FreeBoundarySolver s(cubic(), config(128));
    const auto st = s.init([](double x) { return 0.7 * (1.0 - x * x / 4.0); }, 2.0);
    const Trajectory a = s.run(st, StopRule::at_time(5.0));
    const Trajectory b = s.run(st, StopRule::at_time(5.0));
    REQUIRE(a.samples.size() == b.samples.size());
    for (std::size_t i = 0; i < a.samples.size(); ++i) {
        CHECK(a.samples[i].h == b.samples[i].h);
        CHECK(a.samples[i].max_u == b.samples[i].max_u);
    }
}

TEST_CASE("theta level") {
    SUBCASE("exact Stefan level within one grid cell") {
        const StefanExact se(1.0, 0.5);
        SolverConfig c = config(400, FrontMode::pinned_left);
        c.pinned_value = 0.5;
        const FreeBoundarySolver s(zero_reaction(), c);
        const double t = 2.0;
        const auto st = s.init([&](double x) { return std::max(0.0, se.phi(t, x).value); }, se.rho(t), t);
        const auto lv = theta_level(st, 0.25);
        REQUIRE(lv.has_value());
        CHECK(std::abs(*lv - se.level_position(t, 0.25)) < st.length() / 400.0);
    }
    SUBCASE("plateau above theta is contained") {
        FrontState st;
        st.mode = FrontMode::symmetric_half;
        st.h = 4.0;
        st.values.resize(129);
        const double x1 = 1.5;
        for (int j = 0; j <= 128; ++j) {
            const double x = st.x_at(j);
            st.values[j] = x <= x1 ? 0.6 : 0.6 * (4.0 - x) / (4.0 - x1);
        }
        const auto lv = theta_level(st, 0.5);
        REQUIRE(lv.has_value());
        CHECK(*lv >= x1);
    }
    SUBCASE("centre below theta gives none") {
        FrontState st;
        st.mode = FrontMode::symmetric_half;
        st.h = 1.0;
        st.values.resize(65);
        for (int j = 0; j <= 64; ++j) st.values[j] = 0.49 * (1.0 - st.x_at(j));
        CHECK_FALSE(theta_level(st, 0.5).has_value());
    }
}
