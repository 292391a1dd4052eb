#include "frontlab/classify.hpp"

#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>
#include <future>
#include <map>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace frontlab {

std::string to_string(Verdict verdict) {
    switch (verdict) {
        case Verdict::spreading: return "spreading";
        case Verdict::vanishing: return "vanishing";
        case Verdict::undecided: return "undecided";
    }
    return "undecided";
}

std::string to_string(SpeedLaw law) {
    switch (law) {
        case SpeedLaw::linear: return "linear";
        case SpeedLaw::log: return "log";
        case SpeedLaw::sqrt: return "sqrt";
    }
    return "linear";
}

SpeedLaw speed_law_from_string(const std::string& name) {
    if (name == "linear") return SpeedLaw::linear;
    if (name == "log") return SpeedLaw::log;
    if (name == "sqrt") return SpeedLaw::sqrt;
    throw std::invalid_argument("unknown speed law '" + name + "'");
}

VerdictRule VerdictRule::make(const Nonlinearity& nl, Margins margins) {
    VerdictRule rule;
    if (nl.behaves_as() == NonlinearityKind::monostable || !nl.has_theta()) {
        rule.monostable = true;
        const double slope = nl.f_prime(0.0);
        if (!(slope > 0.0)) throw std::invalid_argument("VerdictRule: monostable term needs f'(0) > 0");
        rule.monostable_span = std::numbers::pi / std::sqrt(slope);
        rule.vanish_ceiling = 1e-3;
        return rule;
    }
    const double th = nl.theta();
    double floor = th;
    if (nl.behaves_as() == NonlinearityKind::bistable) floor = std::max(floor, ground_state(nl).v0);
    rule.spread_floor = floor + margins.up;
    rule.spread_distance = 4.0 * std::max(1.0, std::numbers::pi / std::sqrt(nl.derivative_scale()));
    rule.vanish_ceiling = th - margins.down;
    return rule;
}

namespace {

double front_speed(const FrontState& state, double mu) {
    const int n = state.intervals();
    const auto& u = state.values;
    const double dx = state.length() / n;
    const double right = std::abs(3.0 * u[n] - 4.0 * u[n - 1] + u[n - 2]) / (2.0 * dx);
    const double left = std::abs(-3.0 * u[0] + 4.0 * u[1] - u[2]) / (2.0 * dx);
    switch (state.mode) {
        case FrontMode::two_front: return mu * (left + right);
        case FrontMode::symmetric_half: return 2.0 * mu * right;
        case FrontMode::pinned_left: return mu * right;
    }
    return mu * (left + right);
}

// Largest front travel a decaying linear mode can still absorb before the span reaches `target`.
double travel_capacity(double span, double target) {
    const double rate = std::pow(std::numbers::pi / target, 2);
    auto neg = [&](double l) { return -(l - span) * rate * ((target / l) * (target / l) - 1.0); };
    const auto best = boost::math::tools::brent_find_minima(neg, span, target, 40);
    return -best.second;
}

}  // namespace

std::optional<Verdict> classify_state(const FrontState& state, const VerdictRule& rule, double h0) {
    const double peak = state.max_u();
    if (rule.monostable) {
        const double span = state.h - state.g;
        if (span > rule.monostable_span) return Verdict::spreading;
        if (peak < rule.vanish_ceiling && front_speed(state, rule.mu) <= travel_capacity(span, rule.monostable_span))
            return Verdict::vanishing;
        return std::nullopt;
    }
    if (peak < rule.vanish_ceiling) return Verdict::vanishing;
    if (state.h - h0 <= rule.spread_distance) return std::nullopt;
    if (state.left_end() > -1.0 && state.mode == FrontMode::two_front) return std::nullopt;
    if (state.h < 1.0) return std::nullopt;
    const int n = state.intervals();
    for (int j = 0; j <= n; ++j) {
        const double x = state.x_at(j);
        if (x < -1.0 || x > 1.0) continue;
        if (state.values[j] < rule.spread_floor) return std::nullopt;
    }
    for (double x : {-1.0, 1.0}) {
        if (state.u_at(x) < rule.spread_floor) return std::nullopt;
    }
    return Verdict::spreading;
}

std::optional<Verdict> classify_state(const FrontState& state, const Nonlinearity& nl, double h0, Margins margins) {
    return classify_state(state, VerdictRule::make(nl, margins), h0);
}

ClassifiedRun classify_run(const FreeBoundarySolver& solver, const FrontState& initial, double t_cap,
                           Margins margins, int check_every) {
    const Nonlinearity& nl = solver.nonlinearity();
    VerdictRule rule = VerdictRule::make(nl, margins);
    rule.mu = solver.config().mu;
    const double h0 = initial.h;
    std::optional<Verdict> found;
    auto hook = [&](const FrontState& s) {
        found = classify_state(s, rule, h0);
        return found.has_value();
    };
    ClassifiedRun run;
    run.trajectory = solver.run(initial, StopRule::on_verdict(hook, t_cap, check_every));
    const auto& last = run.trajectory.last();
    run.report.evidence = {last.t, last.max_u, last.u_center, last.h, last.g};
    if (found) {
        run.report.verdict = *found;
        run.report.decided_at = last.t;
    }
    std::ostringstream note;
    if (run.trajectory.truncated) note << "truncated: " << run.trajectory.failure;
    if (!found && !run.trajectory.truncated) note << "undecided at t_cap " << t_cap;
    if (found && *found == Verdict::vanishing && nl.behaves_as() == NonlinearityKind::combustion) {
        note << "vanishing inferred from max u below theta margin";
    }
    if (found && rule.monostable) note << "monostable criteria: span pi/sqrt(f'(0)), or max u < 1e-3 with front travel bounded below that span";
    run.report.note = note.str();
    return run;
}

namespace {

struct ProbeOutcome {
    SigmaProbe probe;
    Trajectory trajectory;
};

ProbeOutcome run_probe(const FreeBoundarySolver& solver, const std::function<double(double)>& phi, double h0,
                       double sigma, const SigmaStarOptions& options) {
    const FrontState initial = solver.init([&](double x) { return sigma * phi(x); }, h0);
    ProbeOutcome out;
    out.probe.sigma = sigma;
    out.probe.t_cap = options.t_cap;
    auto run = classify_run(solver, initial, options.t_cap, options.margins, options.check_every);
    if (run.report.verdict == Verdict::undecided && !run.trajectory.truncated) {
        out.probe.retried = true;
        out.probe.t_cap = 2.0 * options.t_cap;
        run = classify_run(solver, initial, out.probe.t_cap, options.margins, options.check_every);
    }
    out.probe.verdict = run.report.verdict;
    out.probe.decided_at = run.report.decided_at.value_or(run.trajectory.last().t);
    out.trajectory = std::move(run.trajectory);
    return out;
}

}  // namespace

SigmaStarResult sigma_star(const std::function<double(double)>& phi, double h0, const Nonlinearity& nl,
                           const SolverConfig& config, const SigmaStarOptions& options) {
    if (!(options.tol >= 1e-12 * (1.0 - 1e-9))) throw std::invalid_argument("sigma_star: tol below 1e-12");
    if (!(options.sigma_start > 0.0)) throw std::invalid_argument("sigma_star: sigma_start must be positive");
    const FreeBoundarySolver solver(nl, config);
    double phi_max = 0.0;
    for (int k = 0; k <= 1000; ++k) phi_max = std::max(phi_max, phi(-h0 + 2.0 * h0 * k / 1000.0));
    if (!(phi_max > 0.0)) throw std::invalid_argument("sigma_star: phi must be positive somewhere");

    SigmaStarResult result;
    std::optional<ProbeOutcome> lo_probe, hi_probe;
    auto record = [&](ProbeOutcome&& p) {
        result.probes.push_back(p.probe);
        if (p.probe.verdict == Verdict::vanishing) {
            if (!lo_probe || p.probe.sigma > lo_probe->probe.sigma) lo_probe = std::move(p);
        } else if (p.probe.verdict == Verdict::spreading) {
            if (!hi_probe || p.probe.sigma < hi_probe->probe.sigma) hi_probe = std::move(p);
        }
    };

    // Bracket search.
    double sigma = options.sigma_start;
    for (int k = 0; k <= options.max_doublings && !(lo_probe && hi_probe); ++k) {
        if (sigma * phi_max > nl.u_max()) {
            result.failure = "bracket failure: sigma * max(phi) exceeds u_max before spreading";
            break;
        }
        ProbeOutcome p = run_probe(solver, phi, h0, sigma, options);
        const Verdict v = p.probe.verdict;
        record(std::move(p));
        if (v == Verdict::undecided) {
            result.failure = "bracket failure: undecided probe during bracket search";
            break;
        }
        if (lo_probe && hi_probe) break;
        sigma = v == Verdict::vanishing ? 2.0 * sigma : 0.5 * sigma;
    }
    if (!(lo_probe && hi_probe)) {
        if (result.failure.empty()) {
            result.failure = hi_probe ? "bracket failure: every probe spreads" : "bracket failure: no spreading probe";
        }
        if (lo_probe) result.lo = lo_probe->probe.sigma;
        if (hi_probe) result.hi = hi_probe->probe.sigma;
        return result;
    }
    result.bracketed = true;

    // Each round probes `depth` levels of the bisection tree, then follows the sequential path through them.
    const int workers = std::max(1, options.workers);
    int depth = 1;
    while ((2 << depth) - 1 <= workers) ++depth;
    auto midpoint = [](double a, double b) { return a + (b - a) / 2; };
    auto converged = [&] { return hi_probe->probe.sigma / lo_probe->probe.sigma - 1.0 <= options.tol; };
    while (!converged() && result.iterations < options.max_bisections) {
        std::vector<double> sigmas;
        std::vector<std::pair<double, double>> level = {{lo_probe->probe.sigma, hi_probe->probe.sigma}};
        for (int d = 0; d < depth; ++d) {
            std::vector<std::pair<double, double>> next;
            for (const auto& [a, b] : level) {
                const double m = midpoint(a, b);
                if (!(m > a && m < b)) continue;
                sigmas.push_back(m);
                next.emplace_back(a, m);
                next.emplace_back(m, b);
            }
            level = std::move(next);
        }
        if (sigmas.empty()) break;
        std::map<double, ProbeOutcome> outcomes;
        if (sigmas.size() == 1) {
            outcomes.emplace(sigmas.front(), run_probe(solver, phi, h0, sigmas.front(), options));
        } else {
            std::vector<std::future<ProbeOutcome>> futures;
            for (double s : sigmas) {
                futures.push_back(std::async(std::launch::async,
                                             [&, s] { return run_probe(solver, phi, h0, s, options); }));
            }
            for (std::size_t i = 0; i < sigmas.size(); ++i) outcomes.emplace(sigmas[i], futures[i].get());
        }
        for (int d = 0; d < depth && !converged() && result.iterations < options.max_bisections; ++d) {
            const double m = midpoint(lo_probe->probe.sigma, hi_probe->probe.sigma);
            const auto it = outcomes.find(m);
            if (it == outcomes.end()) break;
            const Verdict v = it->second.probe.verdict;
            ++result.iterations;
            record(std::move(it->second));
            if (v == Verdict::undecided) {
                result.stalled = true;
                break;
            }
        }
        if (result.stalled) break;
    }
    result.lo = lo_probe->probe.sigma;
    result.hi = hi_probe->probe.sigma;
    result.converged = result.hi / result.lo - 1.0 <= options.tol;
    if (!result.converged && !result.stalled) result.failure = "bisection budget exhausted";
    if (result.stalled) result.failure = "bisection stalled on an undecided probe";
    result.traj_lo = std::move(lo_probe->trajectory);
    result.traj_hi = std::move(hi_probe->trajectory);
    return result;
}

SpeedFit fit_speed(const Trajectory& traj, SpeedLaw law, TimeWindow window) {
    if (window.empty()) throw std::invalid_argument("fit_speed: degenerate window");
    std::vector<double> xs, ys;
    for (const auto& s : traj.samples) {
        if (s.t < window.t_a || s.t > window.t_b) continue;
        if (law == SpeedLaw::log && !(s.t > 0.0)) continue;
        xs.push_back(law == SpeedLaw::linear ? s.t : (law == SpeedLaw::log ? std::log(s.t) : std::sqrt(s.t)));
        ys.push_back(s.h);
    }
    if (xs.size() < 200) throw std::invalid_argument("fit_speed: degenerate window (fewer than 200 samples)");
    SpeedFit fit;
    fit.law = law;
    fit.window = window;
    fit.samples = xs.size();
    if (law == SpeedLaw::sqrt) {
        double sxy = 0.0, sxx = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            sxy += xs[i] * ys[i];
            sxx += xs[i] * xs[i];
        }
        fit.coefficient = sxy / sxx;
        double ss = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            const double r = ys[i] - fit.coefficient * xs[i];
            ss += r * r;
        }
        fit.rms = std::sqrt(ss / static_cast<double>(xs.size()));
        return fit;
    }
    const LineFit line = fit_line(xs, ys);
    fit.coefficient = line.slope;
    fit.offset = line.intercept;
    fit.rms = line.rms;
    return fit;
}

TimeWindow divergence_window(const Trajectory& traj_lo, const Trajectory& traj_hi, double rel_gap) {
    if (traj_lo.samples.empty() || traj_hi.samples.empty()) return {};
    std::vector<double> th, hh;
    for (const auto& s : traj_hi.samples) {
        th.push_back(s.t);
        hh.push_back(s.h);
    }
    const double t_end = std::min(traj_lo.last().t, traj_hi.last().t);
    double t_b = traj_lo.samples.front().t;
    for (const auto& s : traj_lo.samples) {
        if (s.t > t_end) break;
        const double h_hi = interp_linear(th, hh, s.t);
        if (std::abs(s.h - h_hi) > rel_gap * h_hi) break;
        t_b = s.t;
    }
    TimeWindow w;
    w.t_b = t_b;
    w.t_a = std::max(10.0, t_b / 10.0);
    return w;
}

double fit_shift(const FrontState& state, const GroundState& gs) {
    const int n = state.intervals();
    const bool mirrored = state.mode == FrontMode::symmetric_half;
    auto mismatch = [&](double x0) {
        double sum = 0.0;
        for (int j = 0; j <= n; ++j) {
            const double x = state.x_at(j);
            const double d = state.values[j] - gs.V(x + x0);
            sum += d * d;
            if (mirrored && j > 0) {
                const double e = state.values[j] - gs.V(-x + x0);
                sum += e * e;
            }
        }
        return sum;
    };
    const double reach = 0.25 * (state.h - (mirrored ? -state.h : state.g));
    const auto best = boost::math::tools::brent_find_minima(mismatch, -reach, reach, 40);
    return best.first;
}

}  // namespace frontlab
