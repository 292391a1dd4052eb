#pragma once

#include "frontlab/fb_solver.hpp"
#include "frontlab/nonlinearity.hpp"
#include "frontlab/stationary.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace frontlab {

enum class Verdict { spreading, vanishing, undecided };

std::string to_string(Verdict verdict);

struct Margins {
    double up = 0.05;
    double down = 0.05;

    bool operator==(const Margins&) const = default;
};

/// Thresholds derived once per nonlinearity and reused by every verdict check.
struct VerdictRule {
    double spread_floor = 0.0;     ///< u >= spread_floor on [-1, 1] (theta classes)
    double spread_distance = 0.0;  ///< h - h0 beyond this (theta classes)
    double vanish_ceiling = 0.0;   ///< max u below this
    double monostable_span = 0.0;  ///< h - g beyond this (monostable)
    double mu = 1.0;               ///< front coefficient for the monostable travel bound
    bool monostable = false;

    static VerdictRule make(const Nonlinearity& nl, Margins margins = {});
};

struct Evidence {
    double t = 0.0;
    double max_u = 0.0;
    double u_center = 0.0;
    double h = 0.0;
    double g = 0.0;
};

struct OutcomeReport {
    Verdict verdict = Verdict::undecided;
    std::optional<double> decided_at;
    Evidence evidence;
    std::string note;
};

std::optional<Verdict> classify_state(const FrontState& state, const VerdictRule& rule, double h0);
std::optional<Verdict> classify_state(const FrontState& state, const Nonlinearity& nl, double h0,
                                      Margins margins = {});

/// Runs the solver under a verdict stop rule and reports the outcome together with the trajectory.
struct ClassifiedRun {
    OutcomeReport report;
    Trajectory trajectory;
};

ClassifiedRun classify_run(const FreeBoundarySolver& solver, const FrontState& initial, double t_cap,
                           Margins margins = {}, int check_every = 10);

struct SigmaProbe {
    double sigma = 0.0;
    Verdict verdict = Verdict::undecided;
    double decided_at = 0.0;
    double t_cap = 0.0;
    bool retried = false;
};

struct SigmaStarOptions {
    double tol = 1e-12;         ///< relative bracket width hi / lo - 1
    double t_cap = 5e3;
    double sigma_start = 1.0;
    int max_doublings = 60;
    int max_bisections = 200;
    int check_every = 10;
    int workers = 1;
    Margins margins;
};

struct SigmaStarResult {
    double lo = 0.0;
    double hi = 0.0;
    int iterations = 0;
    std::vector<SigmaProbe> probes;
    bool bracketed = false;
    bool converged = false;
    bool stalled = false;
    std::string failure;
    Trajectory traj_lo;
    Trajectory traj_hi;
};

/// Bracket search on sigma followed by bisection; each probe starts from sigma * phi.
SigmaStarResult sigma_star(const std::function<double(double)>& phi, double h0, const Nonlinearity& nl,
                           const SolverConfig& config, const SigmaStarOptions& options = {});

enum class SpeedLaw { linear, log, sqrt };

std::string to_string(SpeedLaw law);
SpeedLaw speed_law_from_string(const std::string& name);

struct TimeWindow {
    double t_a = 0.0;
    double t_b = 0.0;
    bool empty() const { return !(t_b > t_a); }
};

/// h ~ c t + d, c ln t + d, or c sqrt(t) (no offset).
struct SpeedFit {
    SpeedLaw law = SpeedLaw::linear;
    double coefficient = 0.0;
    double offset = 0.0;
    TimeWindow window;
    double rms = 0.0;
    std::size_t samples = 0;
};

/// Throws std::invalid_argument when fewer than 200 samples fall inside the window.
SpeedFit fit_speed(const Trajectory& traj, SpeedLaw law, TimeWindow window);

/// t_b: last common time before |h_lo - h_hi| first exceeds rel_gap h_hi; t_a = max(10, t_b / 10).
TimeWindow divergence_window(const Trajectory& traj_lo, const Trajectory& traj_hi, double rel_gap = 0.01);

/// x0 minimizing the squared mismatch between u(t, .) and V(. + x0) over the nodes.
double fit_shift(const FrontState& state, const GroundState& gs);

}  // namespace frontlab
