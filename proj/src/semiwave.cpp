#include "frontlab/semiwave.hpp"

#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace frontlab {

namespace {

namespace odeint = boost::numeric::odeint;

using State = std::array<double, 2>;  // (q, p = q')
using Stepper = odeint::runge_kutta_dopri5<State>;

constexpr double kMaxZ = 1e4;

bool has_plateau(const Nonlinearity& nl) {
    return nl.behaves_as() == NonlinearityKind::combustion && nl.has_theta();
}

double stable_root(const Nonlinearity& nl, double c) {
    const double d1 = nl.f_prime(1.0);
    return 0.5 * (c - std::sqrt(c * c - 4.0 * d1));
}

double unstable_root(const Nonlinearity& nl, double c) {
    const double d1 = nl.f_prime(1.0);
    return 0.5 * (c + std::sqrt(c * c - 4.0 * d1));
}

}  // namespace

ShotOutcome shoot(const Nonlinearity& nl, double mu, double c, const SemiWaveOptions& options) {
    if (!(c > 0.0)) return ShotOutcome::undershoot;
    State x{0.0, c / mu};
    double z = 0.0;
    if (has_plateau(nl)) {
        const double th = nl.theta();
        x = {th, c / mu + c * th};
        z = std::log1p(mu * th) / c;
    }
    auto rhs = [&](const State& s, State& ds, double) {
        ds[0] = s[1];
        ds[1] = c * s[1] - nl(s[0]);
    };
    auto stepper = odeint::make_dense_output(options.ode_tol, options.ode_tol, Stepper());
    stepper.initialize(x, z, 1e-3);
    while (stepper.current_time() < kMaxZ) {
        stepper.do_step(rhs);
        const State& s = stepper.current_state();
        if (s[1] <= 0.0 && s[0] < 1.0) return ShotOutcome::undershoot;
        if (s[0] >= 1.0 && s[1] >= options.overshoot_eps) return ShotOutcome::overshoot;
        if (!std::isfinite(s[0]) || !std::isfinite(s[1])) return ShotOutcome::overshoot;
    }
    // Still parked at the saddle: decide by the unstable coordinate.
    const State& s = stepper.current_state();
    const double lm = stable_root(nl, c);
    const double lp = unstable_root(nl, c);
    const double unstable = (s[1] - lm * (s[0] - 1.0)) / (lp - lm);
    return unstable > 0.0 ? ShotOutcome::overshoot : ShotOutcome::undershoot;
}

SemiWaveSolution solve_semiwave(const Nonlinearity& nl, double mu, const SemiWaveOptions& options) {
    if (!(mu > 0.0)) throw std::invalid_argument("solve_semiwave: mu must be positive");
    if (nl.behaves_as() == NonlinearityKind::custom) {
        throw std::invalid_argument("solve_semiwave: nonlinearity class unknown");
    }
    if (!(nl.f_prime(1.0) < 0.0)) throw std::invalid_argument("solve_semiwave: requires f'(1) < 0");

    double lo = 0.0;
    double hi = 1.0;
    int doublings = 0;
    while (shoot(nl, mu, hi, options) != ShotOutcome::overshoot) {
        lo = hi;
        hi *= 2.0;
        if (++doublings > 60) throw std::runtime_error("solve_semiwave: bracket failure after 60 doublings");
    }
    SemiWaveSolution sw;
    sw.mu = mu;
    while (hi - lo > options.tol) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (shoot(nl, mu, mid, options) == ShotOutcome::overshoot) {
            hi = mid;
        } else {
            lo = mid;
        }
        ++sw.iterations;
    }
    sw.bracket_lo = lo;
    sw.bracket_hi = hi;
    const double c = 0.5 * (lo + hi);
    sw.c_star = c;

    // Backward from the saddle along the stable direction, in the reversed variable s = z_top - z.
    const double lm = stable_root(nl, c);
    const double gap = options.top_gap;
    const double q_stop = has_plateau(nl) ? nl.theta() : 0.0;
    auto rhs = [&](const State& s, State& ds, double) {
        ds[0] = -s[1];
        ds[1] = -(c * s[1] - nl(s[0]));
    };
    // Knots are integration end points rather than dense-output values, so knot data is smooth in z.
    auto controlled = odeint::make_controlled(options.ode_tol * 1e-2, options.ode_tol * 1e-2, Stepper());
    auto advance = [&](State x, double s0, double s1) {
        if (s1 > s0) odeint::integrate_adaptive(controlled, rhs, x, s0, s1, std::min(1e-3, s1 - s0));
        return x;
    };
    const double step = options.z_step;
    std::vector<double> ss{0.0};
    std::vector<State> states{State{1.0 - gap, -lm * gap}};
    while (states.back()[0] > q_stop) {
        const double s1 = ss.back() + step;
        if (s1 > kMaxZ) throw std::runtime_error("solve_semiwave: reconstruction stalled");
        states.push_back(advance(states.back(), ss.back(), s1));
        ss.push_back(s1);
    }
    // Locate q = q_stop inside the last interval.
    const State base = states[states.size() - 2];
    const double s_base = ss[ss.size() - 2];
    double a = s_base, b = ss.back();
    for (int i = 0; i < 200 && b - a > 1e-15 * std::max(1.0, b); ++i) {
        const double mid = 0.5 * (a + b);
        (advance(base, s_base, mid)[0] > q_stop ? a : b) = mid;
    }
    const double s_stop = b;
    ss.back() = s_stop;
    states.back() = advance(base, s_base, s_stop);
    states.back()[0] = q_stop;
    if (ss.size() >= 3 && s_stop - s_base < 0.1 * step) {
        ss.erase(ss.end() - 2);
        states.erase(states.end() - 2);
    }
    const double p_stop = states.back()[1];

    double z_plateau = 0.0;
    double p_origin = p_stop;
    if (has_plateau(nl)) {
        // f = 0 below theta: p = p_theta e^{c (z - z_theta)}, q = theta + (p - p_theta) / c.
        p_origin = p_stop - c * nl.theta();
        if (!(p_origin > 0.0)) throw std::runtime_error("solve_semiwave: plateau reconstruction failed");
        z_plateau = std::log(p_stop / p_origin) / c;
    }
    sw.slope_defect = std::abs(mu * p_origin - c);
    sw.z_max = z_plateau + s_stop;

    std::vector<double> zs, qs, ps, cs;
    auto knot = [&](double z, double q, double p) {
        zs.push_back(z);
        qs.push_back(q);
        ps.push_back(p);
        cs.push_back(c * p - nl(q));
    };
    const int plateau_intervals = static_cast<int>(std::ceil(z_plateau / step));
    for (int j = 0; j < plateau_intervals; ++j) {
        const double z = z_plateau * j / plateau_intervals;
        const double p = p_origin * std::exp(c * z);
        knot(z, (p - p_origin) / c, p);
    }
    for (std::size_t k = ss.size(); k-- > 0;) knot(sw.z_max - ss[k], states[k][0], states[k][1]);
    zs.front() = 0.0;
    zs.back() = sw.z_max;
    sw.monotone = std::all_of(ps.begin(), ps.end(), [](double p) { return p > 0.0; });
    for (std::size_t k = 1; k < qs.size(); ++k) sw.monotone = sw.monotone && qs[k] > qs[k - 1];
    sw.profile = HermiteSampler(zs, qs, ps, cs);

    // Defect of the interpolant with 4th-order differences at knot midpoints.
    const double hd = 0.25 * step;
    double worst = 0.0;
    for (std::size_t k = 2; k + 3 < zs.size(); ++k) {
        const double z = 0.5 * (zs[k] + zs[k + 1]);
        const double f2 = sw.q(z + 2 * hd), f1 = sw.q(z + hd), f0 = sw.q(z), m1 = sw.q(z - hd), m2 = sw.q(z - 2 * hd);
        const double d1 = (-f2 + 8.0 * f1 - 8.0 * m1 + m2) / (12.0 * hd);
        const double d2 = (-f2 + 16.0 * f1 - 30.0 * f0 + 16.0 * m1 - m2) / (12.0 * hd * hd);
        worst = std::max(worst, std::abs(d2 - c * d1 + nl(f0)));
    }
    sw.residual = worst;
    return sw;
}

FitReport spreading_speed_check(const Trajectory& traj, const SemiWaveSolution& sw) {
    FitReport r;
    r.c_star = sw.c_star;
    const auto& s = traj.samples;
    if (s.size() < 4) {
        r.note = "too few samples";
        return r;
    }
    const std::size_t start = s.size() / 2;
    std::vector<double> ts, hs, gs;
    for (std::size_t i = start; i < s.size(); ++i) {
        ts.push_back(s[i].t);
        hs.push_back(s[i].h);
        gs.push_back(-s[i].g);
    }
    r.slope = fit_line(ts, hs).slope;
    r.slope_g = fit_line(ts, gs).slope;
    r.relative_gap = std::abs(r.slope - sw.c_star) / sw.c_star;
    const double final_t = s.back().t;
    if (final_t < 100.0) {
        r.note = "final time below 100";
    } else if (r.slope < 0.1 * sw.c_star) {
        r.note = "fronts are not spreading";
    } else {
        r.applicable = true;
    }
    return r;
}

}  // namespace frontlab
