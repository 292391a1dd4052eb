#include "frontlab/fb_solver.hpp"

#include "frontlab/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace frontlab {

namespace {

constexpr double kUndershoot = -1e-10;

struct Speeds {
    double left = 0.0;
    double right = 0.0;
};

}  // namespace

std::string to_string(FrontMode mode) {
    switch (mode) {
        case FrontMode::two_front: return "two_front";
        case FrontMode::symmetric_half: return "symmetric_half";
        case FrontMode::pinned_left: return "pinned_left";
    }
    return "two_front";
}

std::string to_string(BoundaryStencil stencil) {
    return stencil == BoundaryStencil::one_sided_3rd ? "one_sided_3rd" : "one_sided_2nd";
}

std::string to_string(TimeScheme scheme) {
    return scheme == TimeScheme::imex_euler ? "imex_euler" : "imex_ars222";
}

FrontMode front_mode_from_string(const std::string& name) {
    if (name == "two_front") return FrontMode::two_front;
    if (name == "symmetric_half") return FrontMode::symmetric_half;
    if (name == "pinned_left") return FrontMode::pinned_left;
    throw std::invalid_argument("unknown front mode '" + name + "'");
}

BoundaryStencil boundary_stencil_from_string(const std::string& name) {
    if (name == "one_sided_2nd") return BoundaryStencil::one_sided_2nd;
    if (name == "one_sided_3rd") return BoundaryStencil::one_sided_3rd;
    throw std::invalid_argument("unknown boundary stencil '" + name + "'");
}

TimeScheme time_scheme_from_string(const std::string& name) {
    if (name == "imex_euler") return TimeScheme::imex_euler;
    if (name == "imex_ars222") return TimeScheme::imex_ars222;
    throw std::invalid_argument("unknown time scheme '" + name + "'");
}

void SolverConfig::validate() const {
    auto fail = [](const std::string& field, const std::string& why) {
        throw std::invalid_argument("solver." + field + ": " + why);
    };
    if (nodes < 64) fail("nodes", "must be >= 64");
    if (!(mu >= 0.0) || !std::isfinite(mu)) fail("mu", "must be finite and >= 0");
    if (!(dt_rule.value > 0.0)) fail(dt_rule.kind == TimeStepRule::Kind::fixed ? "dt" : "cfl", "must be > 0");
    if (dt_rule.kind == TimeStepRule::Kind::cfl && dt_rule.value > 4.0) fail("cfl", "safety factor above 4");
    if (!(t_end >= 0.0)) fail("t_end", "must be >= 0");
    if (snapshot_stride < 1) fail("snapshot_stride", "must be >= 1");
    if (max_retries < 0) fail("max_retries", "must be >= 0");
}

double FrontState::x_at(int j) const {
    const int n = intervals();
    const double y = -1.0 + 2.0 * j / n;
    return left_end() + 0.5 * (y + 1.0) * length();
}

double FrontState::u_at(double x) const {
    if (mode == FrontMode::symmetric_half) x = std::abs(x);
    const double a = left_end();
    if (x < a || x > h) return 0.0;
    const int n = intervals();
    const double pos = (x - a) / length() * n;
    const int j = std::clamp(static_cast<int>(std::floor(pos)), 0, n - 1);
    const double w = pos - j;
    return (1.0 - w) * values[j] + w * values[j + 1];
}

double FrontState::max_u() const { return *std::max_element(values.begin(), values.end()); }

StopRule StopRule::at_time(double t_end) {
    StopRule r;
    r.kind = Kind::time;
    r.t_end = t_end;
    return r;
}

StopRule StopRule::on_verdict(std::function<bool(const FrontState&)> hook, double t_cap, int check_every) {
    StopRule r;
    r.kind = Kind::verdict;
    r.t_end = t_cap;
    r.hook = std::move(hook);
    r.check_every = std::max(1, check_every);
    return r;
}

StopRule StopRule::front_reaches(double x, double t_cap) {
    StopRule r;
    r.kind = Kind::front_reaches;
    r.t_end = t_cap;
    r.front_position = x;
    return r;
}

struct FreeBoundarySolver::Workspace {
    std::vector<double> e1, e2, y2, rhs, lower, diag, upper;
    void resize(std::size_t n) {
        for (auto* v : {&e1, &e2, &y2, &rhs, &lower, &diag, &upper}) v->assign(n, 0.0);
    }
};

FreeBoundarySolver::FreeBoundarySolver(Nonlinearity nl, SolverConfig config)
    : nl_(std::move(nl)), config_(config) {
    config_.validate();
    if (config_.mode == FrontMode::pinned_left &&
        !(config_.pinned_value > 0.0 && config_.pinned_value <= nl_.u_max())) {
        throw std::invalid_argument("solver.pinned_value: must lie in (0, u_max] for pinned_left");
    }
}

FrontState FreeBoundarySolver::init(const std::function<double(double)>& u0, double h0, double t0) const {
    if (!(h0 > 0.0) || !std::isfinite(h0)) throw std::invalid_argument("init: h0 must be positive");
    const int n = config_.nodes;
    FrontState s;
    s.t = t0;
    s.mode = config_.mode;
    s.h = h0;
    s.g = config_.mode == FrontMode::two_front ? -h0 : (config_.mode == FrontMode::symmetric_half ? -h0 : 0.0);
    s.values.resize(n + 1);

    double peak = 0.0;
    for (int j = 0; j <= n; ++j) {
        const double x = s.x_at(j);
        s.values[j] = u0(x);
        if (!std::isfinite(s.values[j])) throw std::invalid_argument("init: u0 is not finite");
        peak = std::max(peak, std::abs(s.values[j]));
    }
    const double zero_tol = 1e-12 * std::max(1.0, peak);
    const double eps = 1e-4 * h0;
    const double slope_tol = 1e-6 * peak / h0;
    auto inward_slope = [&](double edge, double dir) {
        const double d1 = (u0(edge + dir * eps) - u0(edge)) / eps;
        const double d2 = (u0(edge + 2.0 * dir * eps) - u0(edge)) / (2.0 * eps);
        return 2.0 * d1 - d2;
    };

    if (std::abs(u0(h0)) > zero_tol) throw std::invalid_argument("init: u0(h0) must vanish");
    if (!(inward_slope(h0, -1.0) > slope_tol)) {
        throw std::invalid_argument("init: u0'(h0) must be negative");
    }
    switch (config_.mode) {
        case FrontMode::two_front:
            if (std::abs(u0(-h0)) > zero_tol) throw std::invalid_argument("init: u0(-h0) must vanish");
            if (!(inward_slope(-h0, 1.0) > slope_tol)) {
                throw std::invalid_argument("init: u0'(-h0) must be positive");
            }
            s.values.front() = 0.0;
            break;
        case FrontMode::symmetric_half:
            for (int k = 1; k <= 32; ++k) {
                const double x = h0 * k / 33.0;
                if (std::abs(u0(x) - u0(-x)) > 1e-10 * std::max(1.0, peak)) {
                    throw std::invalid_argument("init: symmetric_half requires even u0");
                }
            }
            break;
        case FrontMode::pinned_left:
            if (std::abs(u0(0.0) - config_.pinned_value) > 1e-10 * std::max(1.0, peak)) {
                throw std::invalid_argument("init: u0(0) must equal the pinned value");
            }
            s.values.front() = config_.pinned_value;
            break;
    }
    s.values.back() = 0.0;
    const int first = config_.mode == FrontMode::symmetric_half ? 0 : 1;
    for (int j = first; j < n; ++j) {
        if (!(s.values[j] > 0.0)) throw std::invalid_argument("init: u0 must be positive inside (-h0, h0)");
    }
    if (peak > nl_.u_max()) throw std::invalid_argument("init: u0 exceeds u_max");
    return s;
}

std::pair<double, double> FreeBoundarySolver::boundary_flux(const FrontState& s) const {
    const auto& v = s.values;
    const int n = s.intervals();
    const double dy = 2.0 / n;
    double vy_left = 0.0, vy_right = 0.0;
    if (config_.stencil == BoundaryStencil::one_sided_3rd) {
        vy_right = (11.0 * v[n] - 18.0 * v[n - 1] + 9.0 * v[n - 2] - 2.0 * v[n - 3]) / (6.0 * dy);
        vy_left = (-11.0 * v[0] + 18.0 * v[1] - 9.0 * v[2] + 2.0 * v[3]) / (6.0 * dy);
    } else {
        vy_right = (3.0 * v[n] - 4.0 * v[n - 1] + v[n - 2]) / (2.0 * dy);
        vy_left = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * dy);
    }
    const double scale = 2.0 / s.length();
    const double ux_h = scale * vy_right;
    if (s.mode == FrontMode::symmetric_half) return {-ux_h, ux_h};
    return {scale * vy_left, ux_h};
}

double FreeBoundarySolver::suggested_dt(const FrontState& s) const {
    if (config_.dt_rule.kind == TimeStepRule::Kind::fixed) return config_.dt_rule.value;
    const auto [ux_g, ux_h] = boundary_flux(s);
    double speed = std::abs(config_.mu * ux_h);
    if (s.mode == FrontMode::two_front) speed = std::max(speed, std::abs(config_.mu * ux_g));
    const double dx = s.length() / s.intervals();
    const double advective = dx / std::max(1.0, speed);
    const double reactive = 1.0 / nl_.derivative_scale();
    return config_.dt_rule.value * std::min(advective, reactive);
}

bool FreeBoundarySolver::try_step(const FrontState& in, double dt, FrontState& out, Workspace& ws,
                                  std::string& why) const {
    // Stepping runs in the diffusive clock tau, dtau = (4 / L^2) dt, so the implicit operator is
    // the fixed matrix v_yy and time itself becomes an explicit unknown.
    const int n = in.intervals();
    const double dy = 2.0 / n;
    const double mu = config_.mu;
    const FrontMode mode = in.mode;
    const bool two = mode == FrontMode::two_front;
    const int first = mode == FrontMode::symmetric_half ? 0 : 1;
    const int last = n - 1;
    const int m = last - first + 1;
    ws.resize(n + 1);

    // dx/dt of each front from one-sided slopes of v.
    auto front_speeds = [&](const double* v, double length) {
        double vy_left = 0.0, vy_right = 0.0;
        if (config_.stencil == BoundaryStencil::one_sided_3rd) {
            vy_right = (11.0 * v[n] - 18.0 * v[n - 1] + 9.0 * v[n - 2] - 2.0 * v[n - 3]) / (6.0 * dy);
            vy_left = (-11.0 * v[0] + 18.0 * v[1] - 9.0 * v[2] + 2.0 * v[3]) / (6.0 * dy);
        } else {
            vy_right = (3.0 * v[n] - 4.0 * v[n - 1] + v[n - 2]) / (2.0 * dy);
            vy_left = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * dy);
        }
        Speeds sp;
        sp.right = -mu * (2.0 / length) * vy_right;
        sp.left = two ? -mu * (2.0 / length) * vy_left : 0.0;
        return sp;
    };

    // (L^2 / 4) times grid advection plus reaction.
    auto explicit_part = [&](const double* v, double length, Speeds sp, std::vector<double>& e) {
        const double scale = 0.25 * length * length;
        for (int j = first; j <= last; ++j) {
            const double y = -1.0 + j * dy;
            double adv = 0.0;
            if (j > 0) {
                const double c = ((1.0 - y) * sp.left + (1.0 + y) * sp.right) / length;
                adv = c * (v[j + 1] - v[j - 1]) / (2.0 * dy);
            }
            e[j] = scale * (adv + nl_(v[j]));
        }
    };

    auto diffusion = [&](const double* v, int j) {
        const double k = 1.0 / (dy * dy);
        if (j == 0) return k * 2.0 * (v[1] - v[0]);
        return k * (v[j + 1] - 2.0 * v[j] + v[j - 1]);
    };

    // Solves (I - tau v_yy) Y = rhs on the unknowns; Y's boundary entries are already set.
    auto implicit_solve = [&](double tau, std::vector<double>& y) {
        const double r = tau / (dy * dy);
        for (int k = 0; k < m; ++k) {
            const int j = first + k;
            ws.lower[k] = -r;
            ws.diag[k] = 1.0 + 2.0 * r;
            ws.upper[k] = j == 0 ? -2.0 * r : -r;
            ws.rhs[k] = ws.rhs[j];
        }
        if (first == 1) ws.rhs[0] += r * y[0];
        ws.rhs[m - 1] += r * y[n];
        solve_tridiagonal(std::span<const double>(ws.lower.data(), m), std::span<const double>(ws.diag.data(), m),
                          std::span<const double>(ws.upper.data(), m), std::span<double>(ws.rhs.data(), m));
        for (int k = 0; k < m; ++k) y[first + k] = ws.rhs[k];
    };

    const double a0 = in.left_end();
    const double b0 = in.h;
    const double len0 = b0 - a0;
    const double clock0 = 0.25 * len0 * len0;
    const double* v0 = in.values.data();

    out.mode = mode;
    out.values.resize(n + 1);
    out.values.front() = in.values.front();
    out.values.back() = 0.0;

    const Speeds s1 = front_speeds(v0, len0);
    explicit_part(v0, len0, s1, ws.e1);

    double a_new = a0, b_new = b0;
    if (config_.scheme == TimeScheme::imex_euler) {
        const double dtau = dt / clock0;
        a_new = a0 + dt * s1.left;
        b_new = b0 + dt * s1.right;
        if (!(b_new - a_new > 0.0)) {
            why = "front collapse";
            return false;
        }
        for (int j = first; j <= last; ++j) ws.rhs[j] = v0[j] + dtau * ws.e1[j];
        implicit_solve(dtau, out.values);
    } else {
        const double gamma = 1.0 - 1.0 / std::sqrt(2.0);
        const double delta = 1.0 - 1.0 / (2.0 * gamma);
        const double spread1 = s1.right - s1.left;

        // The stage-2 clock depends only on stage-1 data, so dtau is fixed by a scalar iteration.
        auto clock2_of = [&](double dtau) {
            const double len = len0 + gamma * dtau * clock0 * spread1;
            return 0.25 * len * len;
        };
        double dtau = dt / clock0;
        for (int it = 0; it < 100; ++it) {
            const double next = dt / (delta * clock0 + (1.0 - delta) * clock2_of(dtau));
            const bool done = std::abs(next - dtau) <= 1e-15 * dtau;
            dtau = next;
            if (done) break;
        }

        // Stage 2.
        const double a2 = a0 + gamma * dtau * clock0 * s1.left;
        const double b2 = b0 + gamma * dtau * clock0 * s1.right;
        const double len2 = b2 - a2;
        if (!(len2 > 0.0)) {
            why = "front collapse";
            return false;
        }
        const double clock2 = 0.25 * len2 * len2;
        ws.y2 = in.values;
        for (int j = first; j <= last; ++j) ws.rhs[j] = v0[j] + gamma * dtau * ws.e1[j];
        implicit_solve(gamma * dtau, ws.y2);
        const Speeds s2 = front_speeds(ws.y2.data(), len2);
        explicit_part(ws.y2.data(), len2, s2, ws.e2);

        // Stage 3 is the new state.
        a_new = a0 + dtau * (delta * clock0 * s1.left + (1.0 - delta) * clock2 * s2.left);
        b_new = b0 + dtau * (delta * clock0 * s1.right + (1.0 - delta) * clock2 * s2.right);
        if (!(b_new - a_new > 0.0)) {
            why = "front collapse";
            return false;
        }
        for (int j = first; j <= last; ++j) {
            ws.rhs[j] = v0[j] + dtau * (delta * ws.e1[j] + (1.0 - delta) * ws.e2[j]) +
                        (1.0 - gamma) * dtau * diffusion(ws.y2.data(), j);
        }
        implicit_solve(gamma * dtau, out.values);
    }

    const double u_max = nl_.u_max();
    for (int j = first; j <= last; ++j) {
        double& u = out.values[j];
        if (!std::isfinite(u)) {
            why = "non-finite value";
            return false;
        }
        if (u < kUndershoot) {
            std::ostringstream os;
            os << "undershoot " << u << " at node " << j;
            why = os.str();
            return false;
        }
        if (u > u_max) {
            why = "value above u_max";
            return false;
        }
        if (u < 0.0) u = 0.0;
    }
    out.t = in.t + dt;
    out.h = b_new;
    switch (mode) {
        case FrontMode::two_front: out.g = a_new; break;
        case FrontMode::symmetric_half: out.g = -b_new; break;
        case FrontMode::pinned_left: out.g = 0.0; break;
    }
    return true;
}

FrontState FreeBoundarySolver::advance(const FrontState& state, double dt, Workspace& ws) const {
    FrontState out;
    std::string why;
    double trial = dt;
    for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
        if (try_step(state, trial, out, ws, why)) return out;
        trial *= 0.5;
    }
    std::ostringstream os;
    os << "step rejected at t=" << state.t << " after " << config_.max_retries << " halvings: " << why;
    throw StepFailure(os.str());
}

FrontState FreeBoundarySolver::step(const FrontState& state) const {
    return step(state, suggested_dt(state));
}

FrontState FreeBoundarySolver::step(const FrontState& state, double dt) const {
    if (state.intervals() != config_.nodes || state.mode != config_.mode) {
        throw std::invalid_argument("step: state does not match solver configuration");
    }
    Workspace ws;
    return advance(state, dt, ws);
}

TrajectorySample FreeBoundarySolver::sample(const FrontState& s) const {
    const auto [ux_g, ux_h] = boundary_flux(s);
    return {s.t, s.g, s.h, ux_g, ux_h, s.max_u(), s.u_center()};
}

Trajectory FreeBoundarySolver::run(FrontState state, const StopRule& stop) const {
    if (state.intervals() != config_.nodes || state.mode != config_.mode) {
        throw std::invalid_argument("run: state does not match solver configuration");
    }
    Trajectory traj;
    traj.samples.push_back(sample(state));
    traj.snapshots.push_back(state);
    Workspace ws;

    const double t_limit = stop.t_end;
    long steps = 0;
    bool snapshot_current = true;
    if (stop.kind == StopRule::Kind::verdict && stop.hook && stop.hook(state)) {
        traj.stop_reason = "verdict";
        return traj;
    }
    for (;;) {
        const double remaining = t_limit - state.t;
        if (remaining <= 1e-12 * std::max(1.0, std::abs(t_limit))) {
            traj.stop_reason = stop.kind == StopRule::Kind::time ? "t_end" : "t_cap";
            break;
        }
        double dt = suggested_dt(state);
        // Avoid a sliver step right before the end time.
        if (dt >= remaining || remaining - dt < 1e-3 * dt) dt = remaining;
        try {
            state = advance(state, dt, ws);
        } catch (const StepFailure& e) {
            traj.truncated = true;
            traj.failure = e.what();
            traj.stop_reason = "step_failure";
            break;
        }
        if (dt == remaining) state.t = t_limit;
        ++steps;
        traj.samples.push_back(sample(state));
        snapshot_current = steps % config_.snapshot_stride == 0;
        if (snapshot_current) traj.snapshots.push_back(state);

        if (stop.kind == StopRule::Kind::verdict && steps % stop.check_every == 0 && stop.hook(state)) {
            traj.stop_reason = "verdict";
            break;
        }
        if (stop.kind == StopRule::Kind::front_reaches &&
            (state.h >= stop.front_position || -state.g >= stop.front_position)) {
            traj.stop_reason = "front_reached";
            break;
        }
    }
    if (!snapshot_current) traj.snapshots.push_back(state);
    return traj;
}

std::optional<double> theta_level(const FrontState& state, double theta) {
    const int n = state.intervals();
    int lo = 0;
    if (state.mode == FrontMode::two_front) {
        // First node at or right of x = 0.
        while (lo < n && state.x_at(lo) < 0.0) ++lo;
    }
    const double u0 = state.u_at(0.0);
    if (!(u0 > theta)) return std::nullopt;
    int hi = n;
    if (state.values[lo] <= theta) {
        // Crossing lies between x = 0 and the first node to its right.
        const double x1 = state.x_at(lo);
        const double w = (u0 - theta) / (u0 - state.values[lo]);
        return w * x1;
    }
    while (hi - lo > 1) {
        const int mid = (lo + hi) / 2;
        if (state.values[mid] > theta) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    const double xl = state.x_at(lo), xr = state.x_at(hi);
    const double vl = state.values[lo], vr = state.values[hi];
    return xl + (vl - theta) / (vl - vr) * (xr - xl);
}

}  // namespace frontlab
