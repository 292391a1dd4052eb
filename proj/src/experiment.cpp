#include "frontlab/experiment.hpp"

#include "frontlab/classify.hpp"
#include "frontlab/csv.hpp"
#include "frontlab/semiwave.hpp"
#include "frontlab/stationary.hpp"
#include "frontlab/stefan.hpp"
#include "frontlab/zeronum.hpp"

#include <json.hpp>
#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <stdexcept>

namespace frontlab {

using nlohmann::json;

namespace {

/// Scientific failures map to exit code 2; everything else thrown during a run is a usage error.
class ScientificFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json sample_json(const TrajectorySample& s) {
    return {{"t", s.t}, {"g", s.g}, {"h", s.h}, {"max_u", s.max_u}, {"u_center", s.u_center}};
}

json trajectory_summary(const Trajectory& traj) {
    json j = {{"samples", traj.samples.size()}, {"stop_reason", traj.stop_reason}, {"truncated", traj.truncated}};
    if (!traj.samples.empty()) j["final"] = sample_json(traj.last());
    if (!traj.failure.empty()) j["failure"] = traj.failure;
    return j;
}

json fit_json(const SpeedFit& f) {
    return {{"law", to_string(f.law)},
            {"coefficient", f.coefficient},
            {"offset", f.offset},
            {"rms", f.rms},
            {"samples", f.samples},
            {"window", {f.window.t_a, f.window.t_b}}};
}

double theta_of(const RunConfig& c, const Nonlinearity& nl) {
    if (c.experiment.theta) return *c.experiment.theta;
    if (nl.has_theta()) return nl.theta();
    throw std::invalid_argument("experiment.theta: required when the nonlinearity has no theta");
}

SolverConfig solver_config(const RunConfig& c) {
    SolverConfig s = c.solver;
    s.mu = c.mu;
    return s;
}

FrontState initial_state(const RunConfig& c, const FreeBoundarySolver& solver) {
    const auto shape = build_shape(c.initial, c.h0);
    const double sigma = c.experiment.sigma;
    return solver.init([&](double x) { return sigma * shape(x); }, c.h0);
}

/// States at identical times, obtained by restarting the solver at each sample time.
std::vector<FrontState> states_at(const FreeBoundarySolver& solver, FrontState state, const std::vector<double>& times) {
    std::vector<FrontState> out;
    out.reserve(times.size());
    for (double t : times) {
        if (t > state.t) {
            Trajectory seg = solver.run(state, StopRule::at_time(t));
            if (!seg.failure.empty()) throw ScientificFailure("solver failure: " + seg.failure);
            if (seg.snapshots.empty()) throw std::logic_error("states_at: run produced no snapshot");
            state = seg.snapshots.back();
        }
        out.push_back(state);
    }
    return out;
}

std::vector<double> uniform_times(double t_end, int count) {
    std::vector<double> ts(count);
    for (int i = 0; i < count; ++i) ts[i] = t_end * i / (count - 1);
    return ts;
}

void simulate(const RunConfig& c, ExperimentArtifacts& a, json& r) {
    FreeBoundarySolver solver(build_nonlinearity(c.nonlinearity), solver_config(c));
    const Trajectory traj = solver.run(initial_state(c, solver), StopRule::at_time(c.solver.t_end));
    a.files["trajectory.csv"] = trajectory_table(traj).text();
    if (!traj.snapshots.empty()) a.files["final_profile.csv"] = profile_table(traj.snapshots.back()).text();
    r["trajectory"] = trajectory_summary(traj);
    if (!traj.failure.empty()) throw ScientificFailure("solver failure: " + traj.failure);
}

void classify(const RunConfig& c, ExperimentArtifacts& a, json& r) {
    FreeBoundarySolver solver(build_nonlinearity(c.nonlinearity), solver_config(c));
    const ClassifiedRun run = classify_run(solver, initial_state(c, solver), c.experiment.t_cap, c.experiment.margins,
                                           c.experiment.check_every);
    a.files["trajectory.csv"] = trajectory_table(run.trajectory).text();
    const auto& ev = run.report.evidence;
    r["verdict"] = to_string(run.report.verdict);
    r["decided_at"] = run.report.decided_at ? json(*run.report.decided_at) : json(nullptr);
    r["evidence"] = {{"t", ev.t}, {"max_u", ev.max_u}, {"u_center", ev.u_center}, {"h", ev.h}, {"g", ev.g}};
    r["note"] = run.report.note;
    r["trajectory"] = trajectory_summary(run.trajectory);
}

void sigma_star_kind(const RunConfig& c, int workers, ExperimentArtifacts& a, json& r) {
    const Nonlinearity nl = build_nonlinearity(c.nonlinearity);
    SigmaStarOptions o;
    o.tol = c.tolerances.sigma;
    o.t_cap = c.experiment.t_cap;
    o.sigma_start = c.experiment.sigma_start;
    o.check_every = c.experiment.check_every;
    o.margins = c.experiment.margins;
    o.workers = workers;
    const SigmaStarResult res = sigma_star(build_shape(c.initial, c.h0), c.h0, nl, solver_config(c), o);

    CsvTable probes({"sigma", "verdict", "decided_at", "t_cap", "retried"});
    for (const auto& p : res.probes) {
        const double code = p.verdict == Verdict::spreading ? 1.0 : (p.verdict == Verdict::vanishing ? -1.0 : 0.0);
        probes.add_row({p.sigma, code, p.decided_at, p.t_cap, p.retried ? 1.0 : 0.0});
    }
    a.files["probes.csv"] = probes.text();
    r["lo"] = res.lo;
    r["hi"] = res.hi;
    r["relative_width"] = res.lo > 0.0 ? res.hi / res.lo - 1.0 : std::numeric_limits<double>::infinity();
    r["iterations"] = res.iterations;
    r["bracketed"] = res.bracketed;
    r["converged"] = res.converged;
    r["stalled"] = res.stalled;
    r["failure"] = res.failure;
    if (!res.bracketed) throw ScientificFailure(res.failure.empty() ? "bracket failure" : res.failure);

    a.files["traj_lo.csv"] = trajectory_table(res.traj_lo).text();
    a.files["traj_hi.csv"] = trajectory_table(res.traj_hi).text();
    const TimeWindow w = divergence_window(res.traj_lo, res.traj_hi, c.tolerances.rel_gap);
    r["window"] = {w.t_a, w.t_b};
    json fits = json::object();
    for (SpeedLaw law : {SpeedLaw::linear, SpeedLaw::log, SpeedLaw::sqrt}) {
        try {
            fits[to_string(law)] = fit_json(fit_speed(res.traj_lo, law, w));
        } catch (const std::invalid_argument& e) {
            fits[to_string(law)] = {{"error", e.what()}};
        }
    }
    r["fits"] = fits;

    if (nl.behaves_as() == NonlinearityKind::combustion && nl.has_theta()) {
        CsvTable ratio({"t", "theta_level", "h", "ratio"});
        for (const auto& s : res.traj_lo.snapshots) {
            if (s.t < w.t_a || s.t > w.t_b) continue;
            if (const auto lv = theta_level(s, nl.theta())) ratio.add_row({s.t, *lv, s.h, *lv / s.h});
        }
        a.files["theta_ratio.csv"] = ratio.text();
    }
    if (nl.behaves_as() == NonlinearityKind::bistable) {
        const GroundState gs = ground_state(nl);
        CsvTable shift({"t", "x0"});
        for (const auto& s : res.traj_lo.snapshots) {
            if (s.t >= w.t_a && s.t <= w.t_b) shift.add_row({s.t, fit_shift(s, gs)});
        }
        a.files["shift.csv"] = shift.text();
    }
    if (!res.converged) throw ScientificFailure(res.stalled ? "bisection stalled" : "bisection did not converge");
}

void semiwave_kind(const RunConfig& c, ExperimentArtifacts& a, json& r) {
    SemiWaveOptions o;
    o.tol = c.tolerances.semiwave;
    SemiWaveSolution sw;
    try {
        sw = solve_semiwave(build_nonlinearity(c.nonlinearity), c.mu, o);
    } catch (const std::runtime_error& e) {
        throw ScientificFailure(e.what());
    }
    CsvTable profile({"z", "q", "q_prime"});
    for (double z : sw.profile.xs()) profile.add_row({z, sw.q(z), sw.q_prime(z)});
    a.files["profile.csv"] = profile.text();
    r["c_star"] = sw.c_star;
    r["bracket"] = {sw.bracket_lo, sw.bracket_hi};
    r["iterations"] = sw.iterations;
    r["z_max"] = sw.z_max;
    r["slope_defect"] = sw.slope_defect;
    r["residual"] = sw.residual;
    r["monotone"] = sw.monotone;
}

void xi0_kind(const RunConfig& c, ExperimentArtifacts& a, json& r) {
    const double theta = theta_of(c, build_nonlinearity(c.nonlinearity));
    const double xi = solve_xi0(c.mu, theta);
    a.files["xi0.txt"] = format_number(xi) + "\n";
    r["mu"] = c.mu;
    r["theta"] = theta;
    r["xi0"] = xi;
    r["defect"] = std::abs(xi0_equation_lhs(xi) - c.mu * theta);
}

void groundstate_kind(const RunConfig& c, ExperimentArtifacts& a, json& r) {
    const GroundState gs = ground_state(build_nonlinearity(c.nonlinearity));
    CsvTable profile({"x", "V", "V_prime"});
    const int n = 1000;
    const double x_max = 25.0 * gs.lambda0;
    for (int i = 0; i <= n; ++i) {
        const double x = x_max * i / n;
        profile.add_row({x, gs.V(x), gs.V_prime(x)});
    }
    a.files["profile.csv"] = profile.text();
    r["v0"] = gs.v0;
    r["lambda0"] = gs.lambda0;
    r["A0"] = gs.A0;
    r["A"] = gs.A;
    r["rho"] = barrier_rho(*gs.nl);
}

void bump_kind(const RunConfig& c, ExperimentArtifacts& a, json& r) {
    const Nonlinearity nl = build_nonlinearity(c.nonlinearity);
    CsvTable table({"b", "l", "L", "slope", "l_abs_slope", "l_over_L"});
    json rows = json::array();
    bool ok = true;
    std::vector<double> bs = c.experiment.b_values;
    std::sort(bs.begin(), bs.end());
    double prev_l = std::numeric_limits<double>::infinity();
    for (double b : bs) {
        const BumpProfile bp = bump(nl, b);
        const double ls = bp.l * std::abs(bp.slope);
        const double ratio = bp.l / bp.L;
        table.add_row({b, bp.l, bp.L, bp.slope, ls, ratio});
        const bool slope_ok = ls < 2.0 * b;
        const bool ratio_ok = ratio < 2.0 * b / bp.theta;
        const bool monotone = bp.l < prev_l;
        prev_l = bp.l;
        ok = ok && slope_ok && ratio_ok && monotone;
        rows.push_back({{"b", b}, {"l", bp.l}, {"L", bp.L}, {"slope", bp.slope}, {"l_abs_slope_below_2b", slope_ok},
                        {"l_over_L_below_2b_over_theta", ratio_ok}, {"l_decreasing_in_b", monotone}});
    }
    a.files["bumps.csv"] = table.text();
    r["bumps"] = rows;
    r["passed"] = ok;
    if (!ok) throw ScientificFailure("bump inequalities violated");
}

void fit_speed_kind(const RunConfig& c, ExperimentArtifacts& a, json& r) {
    const Nonlinearity nl = build_nonlinearity(c.nonlinearity);
    FreeBoundarySolver solver(nl, solver_config(c));
    const Trajectory traj = solver.run(initial_state(c, solver), StopRule::at_time(c.solver.t_end));
    a.files["trajectory.csv"] = trajectory_table(traj).text();
    r["trajectory"] = trajectory_summary(traj);
    if (!traj.failure.empty()) throw ScientificFailure("solver failure: " + traj.failure);
    TimeWindow w{c.experiment.t_a, c.experiment.t_b};
    if (!(w.t_b > w.t_a)) w = {0.5 * traj.last().t, traj.last().t};
    const SpeedFit fit = fit_speed(traj, speed_law_from_string(c.experiment.law), w);
    r["fit"] = fit_json(fit);
    if (fit.law == SpeedLaw::linear && nl.behaves_as() != NonlinearityKind::custom) {
        SemiWaveOptions o;
        o.tol = c.tolerances.semiwave;
        try {
            const SemiWaveSolution sw = solve_semiwave(nl, c.mu, o);
            r["c_star"] = sw.c_star;
            r["relative_gap"] = std::abs(fit.coefficient - sw.c_star) / sw.c_star;
        } catch (const std::exception& e) {
            r["c_star_error"] = e.what();
        }
    }
}

void zeronum_kind(const RunConfig& c, int workers, ExperimentArtifacts& a, json& r) {
    const Nonlinearity nl = build_nonlinearity(c.nonlinearity);
    const SolverConfig sc = solver_config(c);
    FreeBoundarySolver solver(nl, sc);
    const std::vector<double> times = uniform_times(c.solver.t_end, c.experiment.zeronum_samples);
    std::vector<SampledFunction> ws;
    if (c.experiment.zeronum_source == "reflection") {
        for (const auto& s : states_at(solver, initial_state(c, solver), times)) ws.push_back(reflection_difference(s));
    } else {
        SigmaStarOptions o;
        o.tol = c.tolerances.sigma;
        o.t_cap = c.experiment.t_cap;
        o.sigma_start = c.experiment.sigma_start;
        o.check_every = c.experiment.check_every;
        o.margins = c.experiment.margins;
        o.workers = workers;
        const auto shape = build_shape(c.initial, c.h0);
        const SigmaStarResult res = sigma_star(shape, c.h0, nl, sc, o);
        if (!res.bracketed) throw ScientificFailure(res.failure.empty() ? "bracket failure" : res.failure);
        r["bracket"] = {res.lo, res.hi};
        const auto lo = states_at(solver, solver.init([&](double x) { return res.lo * shape(x); }, c.h0), times);
        const auto hi = states_at(solver, solver.init([&](double x) { return res.hi * shape(x); }, c.h0), times);
        for (std::size_t i = 0; i < times.size(); ++i) ws.push_back(state_difference(hi[i], lo[i]));
    }
    ZeroCountOptions zo;
    zo.tol_rel = c.tolerances.zero_rel;
    zo.slope_tol = c.tolerances.slope;
    const ZeroCountSeries series = zero_count_series(times, ws, zo);
    const NonincreaseCheck check = check_nonincrease(series);
    a.files["zero_counts.csv"] = to_csv(series);
    json patterns = json::array();
    int endpoint_hits = 0;
    for (std::size_t i = 0; i < series.times.size(); ++i) {
        endpoint_hits += series.endpoint_hits[i] ? 1 : 0;
        if (i == 0 || series.patterns[i] != series.patterns[i - 1]) {
            patterns.push_back({{"t", series.times[i]}, {"pattern", series.patterns[i]}});
        }
    }
    r["source"] = c.experiment.zeronum_source;
    r["pattern_changes"] = patterns;
    r["endpoint_hits"] = endpoint_hits;
    r["increases"] = check.increases;
    r["drops"] = check.drops;
    r["unflagged_drops"] = check.unflagged_drops;
    r["boundary_drops"] = check.boundary_drops;
    r["passed"] = check.passed();
    if (!check.passed()) throw ScientificFailure("zero count not nonincreasing");
}

void stefan_check_kind(const RunConfig& c, ExperimentArtifacts& a, json& r) {
    double theta = 0.5;
    if (c.experiment.theta) {
        theta = *c.experiment.theta;
    } else if (c.nonlinearity.kind == "combustion" && c.nonlinearity.params.count("theta")) {
        theta = c.nonlinearity.params.at("theta");
    }
    const StefanExact se(c.mu, theta);
    const auto zero = Nonlinearity::make_custom(NonlinearityKind::combustion, [](double) { return 0.0; },
                                                [](double) { return 0.0; }, theta, 2.0, false);
    SolverConfig sc = solver_config(c);
    sc.mode = FrontMode::pinned_left;
    sc.pinned_value = theta;
    FreeBoundarySolver solver(zero, sc);
    const double t0 = c.experiment.t0;
    const FrontState init = solver.init([&](double x) { return std::max(0.0, se.phi(t0, x).value); }, se.rho(t0), t0);
    const Trajectory traj = solver.run(init, StopRule::at_time(c.solver.t_end));
    CsvTable table({"t", "h", "rho", "relative_error"});
    double worst = 0.0;
    for (const auto& s : traj.samples) {
        const double rho = se.rho(s.t);
        const double err = std::abs(s.h - rho) / rho;
        worst = std::max(worst, err);
        table.add_row({s.t, s.h, rho, err});
    }
    a.files["front_error.csv"] = table.text();
    r["xi0"] = se.xi0();
    r["theta"] = theta;
    r["max_relative_error"] = worst;
    r["trajectory"] = trajectory_summary(traj);
    if (!traj.failure.empty()) throw ScientificFailure("solver failure: " + traj.failure);
}

void barrier_check_kind(const RunConfig& c, ExperimentArtifacts& a, json& r) {
    const GroundState gs = ground_state(build_nonlinearity(c.nonlinearity));
    const double l2 = gs.lambda0 * gs.lambda0;
    const double m = c.experiment.m_factor * l2 / c.mu;
    const double m1 = c.experiment.m1_factor * l2 / c.mu;
    const auto& e = c.experiment;
    std::vector<double> tg(e.barrier_t_points), xg(e.barrier_x_points);
    const double ratio = std::log(e.barrier_t_max / e.barrier_t_min);
    for (int i = 0; i < e.barrier_t_points; ++i) tg[i] = e.barrier_t_min * std::exp(ratio * i / (e.barrier_t_points - 1));
    for (int i = 0; i < e.barrier_x_points; ++i) xg[i] = static_cast<double>(i) / (e.barrier_x_points - 1);
    const ResidualReport rep = barrier_residuals(gs, c.mu, m, m1, tg, xg, e.x0);
    json checks = json::array();
    for (const auto& ch : rep.checks) {
        checks.push_back({{"name", ch.name},
                          {"sense", ch.sense},
                          {"onset", finite_or_null(ch.onset)},
                          {"worst_wrong", ch.worst_wrong},
                          {"extreme", ch.extreme},
                          {"evaluated", ch.evaluated},
                          {"violations", ch.violations},
                          {"passed", ch.passed}});
    }
    a.files["barrier.txt"] = rep.to_text();
    r["m"] = m;
    r["m1"] = m1;
    r["rho"] = rep.rho;
    r["onset"] = finite_or_null(rep.onset);
    r["checks"] = checks;
    r["passed"] = rep.passed();
    if (!rep.passed()) throw ScientificFailure("barrier residuals have the wrong sign");
}

}  // namespace

std::string sha256_hex(const std::string& data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("sha256 failed");
    }
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 15];
    }
    return out;
}

int resolve_workers(const RunConfig& config, std::ostream& log) {
    std::optional<int> env;
    if (const char* raw = std::getenv("FRONTLAB_WORKERS")) {
        char* end = nullptr;
        const long v = std::strtol(raw, &end, 10);
        if (end != raw && *end == '\0' && v >= 1) {
            env = static_cast<int>(v);
        } else {
            log << "warning: ignoring FRONTLAB_WORKERS='" << raw << "'\n";
        }
    }
    if (config.workers) {
        if (env && *env != *config.workers) {
            log << "warning: FRONTLAB_WORKERS=" << *env << " overridden by config workers=" << *config.workers
                << "\n";
        }
        return *config.workers;
    }
    return env.value_or(1);
}

ExperimentArtifacts compute_experiment(const RunConfig& config, std::ostream& log) {
    ExperimentArtifacts a;
    json r;
    r["kind"] = to_string(config.kind);
    const int workers = resolve_workers(config, log);
    try {
        switch (config.kind) {
            case ExperimentKind::simulate: simulate(config, a, r); break;
            case ExperimentKind::classify: classify(config, a, r); break;
            case ExperimentKind::sigma_star: sigma_star_kind(config, workers, a, r); break;
            case ExperimentKind::semiwave: semiwave_kind(config, a, r); break;
            case ExperimentKind::xi0: xi0_kind(config, a, r); break;
            case ExperimentKind::groundstate: groundstate_kind(config, a, r); break;
            case ExperimentKind::bump: bump_kind(config, a, r); break;
            case ExperimentKind::fit_speed: fit_speed_kind(config, a, r); break;
            case ExperimentKind::zeronum: zeronum_kind(config, workers, a, r); break;
            case ExperimentKind::stefan_check: stefan_check_kind(config, a, r); break;
            case ExperimentKind::barrier_check: barrier_check_kind(config, a, r); break;
        }
        r["status"] = "ok";
    } catch (const ScientificFailure& e) {
        a.status = exit_code::scientific;
        r["status"] = "scientific_failure";
        r["error"] = e.what();
    } catch (const StepFailure& e) {
        a.status = exit_code::scientific;
        r["status"] = "scientific_failure";
        r["error"] = e.what();
    } catch (const std::invalid_argument& e) {
        a.status = exit_code::usage;
        r["status"] = "usage_error";
        r["error"] = e.what();
    } catch (const std::domain_error& e) {
        a.status = exit_code::usage;
        r["status"] = "usage_error";
        r["error"] = e.what();
    }
    a.report = r.dump(2) + "\n";
    return a;
}

int run_experiment(const RunConfig& config, const std::filesystem::path& out_dir, std::ostream& log) {
    const ExperimentArtifacts a = compute_experiment(config, log);
    json manifest;
    manifest["config"] = json::parse(serialize(config));
    manifest["status"] = a.status;
    json digests = json::object();
    write_text(out_dir / "report.json", a.report);
    digests["report.json"] = sha256_hex(a.report);
    for (const auto& [name, content] : a.files) {
        write_text(out_dir / name, content);
        digests[name] = sha256_hex(content);
    }
    manifest["outputs"] = digests;
    write_text(out_dir / "manifest.json", manifest.dump(2) + "\n");
    if (a.status != exit_code::success) log << "frontlab: " << json::parse(a.report).value("error", "") << "\n";
    return a.status;
}

int run_experiment(const RunConfig& config, std::ostream& log) {
    return run_experiment(config, config.output, log);
}

}  // namespace frontlab
