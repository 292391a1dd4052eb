#pragma once

#include "frontlab/fb_solver.hpp"

#include <span>
#include <string>
#include <vector>

namespace frontlab {

/// Run-length compressed signs over {+, 0, -}; "-" is written as the ASCII hyphen.
struct SignPattern {
    std::string pattern;
    std::vector<double> zero_locations;
    double tolerance = 0.0;
};

/// Values inside [-tol, tol] quantize to 0. A "0" symbol is emitted for dead-band runs of at least
/// two nodes, and for single nodes that do not separate opposite signs.
SignPattern sign_pattern(std::span<const double> xs, std::span<const double> ws, double tol);

struct SampledFunction {
    std::vector<double> xs;
    std::vector<double> ws;
};

/// w(x) = u(x) - u(-x) on [-k, k], k = min(h, -g), sampled at `points` uniform nodes
/// (state.intervals() + 1 when points < 2).
SampledFunction reflection_difference(const FrontState& state, int points = 0);

/// w(x) = a(x) - b(x) on the overlap of the two supports.
SampledFunction state_difference(const FrontState& a, const FrontState& b, int points = 0);

struct ZeroCountOptions {
    double tol_rel = 1e-7;     ///< dead-band half-width relative to max |w| at each time
    double tol_floor = 1e-12;  ///< absolute lower bound on the dead-band
    double slope_tol = 1e-5;
};

struct ZeroCountSeries {
    std::vector<double> times;
    std::vector<int> counts;
    std::vector<bool> degenerate;
    std::vector<bool> endpoint_hits;  ///< w inside the dead-band at either end of the interval
    std::vector<bool> boundary_events;  ///< sign of w at an end differs from the previous sample
    std::vector<std::string> patterns;
};

/// Throws std::invalid_argument when times and samples disagree in length or times do not increase.
ZeroCountSeries zero_count_series(std::span<const double> times, std::span<const SampledFunction> samples,
                                  const ZeroCountOptions& options = {});

struct NonincreaseCheck {
    int increases = 0;
    int drops = 0;
    int unflagged_drops = 0;
    int boundary_drops = 0;  ///< drops next to a boundary event and no degenerate zero
    bool passed() const { return increases == 0 && unflagged_drops == 0; }
};

/// A drop between samples i-1 and i is flagged when a degenerate zero occurs at a sample within
/// `window` of either index.
NonincreaseCheck check_nonincrease(const ZeroCountSeries& series, int window = 2);

/// "t,count,degenerate" rows.
std::string to_csv(const ZeroCountSeries& series);

}  // namespace frontlab
