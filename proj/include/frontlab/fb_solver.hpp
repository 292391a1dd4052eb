#pragma once

#include "frontlab/nonlinearity.hpp"

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace frontlab {

/// Which ends of the computational interval are free boundaries.
///   two_front       both g(t) and h(t) move, u = 0 at both.
///   symmetric_half  even data on [0, h(t)], Neumann at x = 0, g = -h implied.
///   pinned_left     Dirichlet u(t, 0) = pinned_value, single right front (g reported as 0).
enum class FrontMode { two_front, symmetric_half, pinned_left };
enum class BoundaryStencil { one_sided_2nd, one_sided_3rd };
/// imex_euler: first-order splitting. imex_ars222: two-stage L-stable IMEX with a Heun-type
/// predictor-corrector on the fronts (default).
enum class TimeScheme { imex_euler, imex_ars222 };

std::string to_string(FrontMode mode);
std::string to_string(BoundaryStencil stencil);
std::string to_string(TimeScheme scheme);
FrontMode front_mode_from_string(const std::string& name);
BoundaryStencil boundary_stencil_from_string(const std::string& name);
TimeScheme time_scheme_from_string(const std::string& name);

struct TimeStepRule {
    enum class Kind { fixed, cfl };
    Kind kind = Kind::cfl;
    double value = 0.5;  ///< dt for fixed, safety factor for cfl

    static TimeStepRule fixed(double dt) { return {Kind::fixed, dt}; }
    static TimeStepRule cfl(double safety) { return {Kind::cfl, safety}; }
    bool operator==(const TimeStepRule&) const = default;
};

struct SolverConfig {
    int nodes = 800;  ///< N: number of grid intervals, N + 1 nodes
    double mu = 1.0;
    TimeStepRule dt_rule = TimeStepRule::cfl(0.5);
    double t_end = 10.0;
    int snapshot_stride = 100;
    BoundaryStencil stencil = BoundaryStencil::one_sided_2nd;
    FrontMode mode = FrontMode::two_front;
    TimeScheme scheme = TimeScheme::imex_ars222;
    double pinned_value = 0.0;
    int max_retries = 40;

    /// Throws std::invalid_argument naming the offending field.
    void validate() const;
    bool operator==(const SolverConfig&) const = default;
};

/// Solution on the front-fixed grid y_j = -1 + 2j/N, x = left + (y + 1)(h - left)/2.
struct FrontState {
    double t = 0.0;
    double g = 0.0;
    double h = 0.0;
    std::vector<double> values;
    FrontMode mode = FrontMode::two_front;

    int intervals() const { return static_cast<int>(values.size()) - 1; }
    /// Physical left end of the computational interval (g, or 0 for half-line modes).
    double left_end() const { return mode == FrontMode::two_front ? g : 0.0; }
    double length() const { return h - left_end(); }
    double x_at(int j) const;
    /// Linear interpolation in x; mirrored for symmetric_half; 0 outside the support.
    double u_at(double x) const;
    double max_u() const;
    double u_center() const { return u_at(0.0); }
};

struct TrajectorySample {
    double t = 0.0;
    double g = 0.0;
    double h = 0.0;
    double ux_g = 0.0;
    double ux_h = 0.0;
    double max_u = 0.0;
    double u_center = 0.0;
};

struct Trajectory {
    std::vector<TrajectorySample> samples;
    std::vector<FrontState> snapshots;
    bool truncated = false;
    std::string stop_reason;
    std::string failure;

    const TrajectorySample& last() const { return samples.back(); }
};

struct StopRule {
    enum class Kind { time, verdict, front_reaches };
    Kind kind = Kind::time;
    double t_end = 0.0;  ///< end time, or the fail-safe cap for the other kinds
    std::function<bool(const FrontState&)> hook;
    int check_every = 1;
    double front_position = 0.0;

    static StopRule at_time(double t_end);
    static StopRule on_verdict(std::function<bool(const FrontState&)> hook, double t_cap, int check_every = 1);
    static StopRule front_reaches(double x, double t_cap);
};

class StepFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Integrates u_t = u_xx + f(u) on [g(t), h(t)] with g' = -mu u_x(t, g), h' = -mu u_x(t, h).
///
/// The moving interval is mapped onto [-1, 1]; with L = h - g the transformed equation is
///   v_t = (4/L^2) v_yy + [((1-y) g' + (1+y) h') / L] v_y + f(v).
/// Diffusion is implicit (tridiagonal), advection, reaction and front motion are explicit.
class FreeBoundarySolver {
public:
    FreeBoundarySolver(Nonlinearity nl, SolverConfig config);

    /// Samples u0 onto the grid after checking membership of the admissible class.
    FrontState init(const std::function<double(double)>& u0, double h0, double t0 = 0.0) const;

    /// One accepted step at the rule's dt (halved on rejection).
    FrontState step(const FrontState& state) const;
    /// One accepted step of at most `dt`; throws StepFailure after max_retries halvings.
    FrontState step(const FrontState& state, double dt) const;

    Trajectory run(FrontState state, const StopRule& stop) const;

    /// One-sided slopes (u_x at the left end, u_x at h) in physical units.
    std::pair<double, double> boundary_flux(const FrontState& state) const;

    double suggested_dt(const FrontState& state) const;

    const SolverConfig& config() const { return config_; }
    const Nonlinearity& nonlinearity() const { return nl_; }

private:
    struct Workspace;
    bool try_step(const FrontState& in, double dt, FrontState& out, Workspace& ws, std::string& why) const;
    FrontState advance(const FrontState& state, double dt, Workspace& ws) const;
    TrajectorySample sample(const FrontState& state) const;

    Nonlinearity nl_;
    SolverConfig config_;
};

/// Unique x in (0, h) with u(t, x) = theta, or nullopt when u(t, 0) <= theta.
std::optional<double> theta_level(const FrontState& state, double theta);

}  // namespace frontlab
