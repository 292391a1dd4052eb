#pragma once

#include "frontlab/fb_solver.hpp"
#include "frontlab/nonlinearity.hpp"
#include "frontlab/numerics.hpp"

#include <string>
#include <vector>

namespace frontlab {

enum class ShotOutcome { undershoot, overshoot };

/// Pair (c*, q*) with q'' - c q' + f(q) = 0 on z > 0, q(0) = 0, mu q'(0) = c, q(+inf) = 1.
struct SemiWaveSolution {
    double c_star = 0.0;
    double mu = 0.0;
    double bracket_lo = 0.0;
    double bracket_hi = 0.0;
    int iterations = 0;
    double z_max = 0.0;
    double slope_defect = 0.0;  ///< |mu q'(0) - c*|
    double residual = 0.0;      ///< max |q'' - c q' + f(q)| on the sample grid
    bool monotone = false;
    HermiteSampler profile;     ///< z -> q on [0, z_max]

    double q(double z) const { return profile(z); }
    double q_prime(double z) const { return profile.derivative(z); }
};

struct SemiWaveOptions {
    double tol = 1e-12;        ///< absolute bracket width in c
    double ode_tol = 1e-10;    ///< embedded RK tolerance
    double overshoot_eps = 1e-12;
    double top_gap = 1e-6;     ///< reconstruction starts at q = 1 - top_gap
    double z_step = 0.005;     ///< profile knot spacing
};

/// Classification of one forward shot from (q, q') = (0, c / mu).
ShotOutcome shoot(const Nonlinearity& nl, double mu, double c, const SemiWaveOptions& options = {});

/// Bisection on c; throws std::runtime_error if no overshoot appears within 60 doublings.
SemiWaveSolution solve_semiwave(const Nonlinearity& nl, double mu, const SemiWaveOptions& options = {});

struct FitReport {
    bool applicable = false;
    double slope = 0.0;      ///< least-squares slope of h over the last half of samples
    double slope_g = 0.0;    ///< same for -g
    double c_star = 0.0;
    double relative_gap = 0.0;
    std::string note;
};

FitReport spreading_speed_check(const Trajectory& traj, const SemiWaveSolution& sw);

}  // namespace frontlab
