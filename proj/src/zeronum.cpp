#include "frontlab/zeronum.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace frontlab {

namespace {

int quantize(double w, double tol) {
    if (w > tol) return 1;
    if (w < -tol) return -1;
    return 0;
}

char symbol(int s) { return s > 0 ? '+' : (s < 0 ? '-' : '0'); }

struct Scan {
    SignPattern pattern;
    int sign_changes = 0;
    bool degenerate = false;
    bool endpoint_hit = false;
    int left_sign = 0;
    int right_sign = 0;
};

Scan scan(std::span<const double> xs, std::span<const double> ws, double tol, double slope_tol) {
    Scan out;
    out.pattern.tolerance = tol;
    const std::size_t n = ws.size();
    if (n == 0) return out;
    std::vector<int> q(n);
    for (std::size_t i = 0; i < n; ++i) q[i] = quantize(ws[i], tol);
    out.endpoint_hit = q.front() == 0 || q.back() == 0;
    out.left_sign = q.front();
    out.right_sign = q.back();

    auto push = [&](int s) {
        if (out.pattern.pattern.empty() || out.pattern.pattern.back() != symbol(s)) {
            out.pattern.pattern.push_back(symbol(s));
        }
    };
    auto crossing = [&](std::size_t a, std::size_t b) {
        const double x = xs[a] + (xs[b] - xs[a]) * ws[a] / (ws[a] - ws[b]);
        out.pattern.zero_locations.push_back(x);
        const double slope = std::abs(ws[b] - ws[a]) / (xs[b] - xs[a]);
        if (slope < slope_tol) out.degenerate = true;
    };

    int last_sign = 0;
    std::size_t last_index = 0;
    std::size_t i = 0;
    while (i < n) {
        if (q[i] != 0) {
            if (last_sign != 0 && q[i] != last_sign) {
                ++out.sign_changes;
                if (last_index + 1 == i) crossing(last_index, i);
            }
            push(q[i]);
            last_sign = q[i];
            last_index = i;
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < n && q[j] == 0) ++j;
        const std::size_t run = j - i;
        const int next = j < n ? q[j] : 0;
        const bool separates = run == 1 && last_sign != 0 && next != 0 && next != last_sign;
        if (separates) {
            crossing(i - 1, i + 1);
        } else {
            push(0);
            out.pattern.zero_locations.push_back(0.5 * (xs[i] + xs[j - 1]));
            if (i > 0 && j < n) out.degenerate = true;
        }
        i = j;
    }
    return out;
}

SampledFunction sample_on(double a, double b, int points, const std::function<double(double)>& w) {
    SampledFunction s;
    if (!(b > a)) {
        s.xs = {a};
        s.ws = {w(a)};
        return s;
    }
    s.xs.resize(points);
    s.ws.resize(points);
    for (int i = 0; i < points; ++i) {
        const double x = i + 1 == points ? b : a + (b - a) * i / (points - 1);
        s.xs[i] = x;
        s.ws[i] = w(x);
    }
    return s;
}

double left_of(const FrontState& s) {
    switch (s.mode) {
        case FrontMode::two_front: return s.g;
        case FrontMode::symmetric_half: return -s.h;
        case FrontMode::pinned_left: break;
    }
    return 0.0;
}

}  // namespace

SignPattern sign_pattern(std::span<const double> xs, std::span<const double> ws, double tol) {
    return scan(xs, ws, tol, 0.0).pattern;
}

SampledFunction reflection_difference(const FrontState& state, int points) {
    const double k = std::max(0.0, std::min(state.h, -left_of(state)));
    const int m = points >= 2 ? points : state.intervals() + 1;
    return sample_on(-k, k, m, [&](double x) { return state.u_at(x) - state.u_at(-x); });
}

SampledFunction state_difference(const FrontState& a, const FrontState& b, int points) {
    const double lo = std::max(left_of(a), left_of(b));
    const double hi = std::min(a.h, b.h);
    const int m = points >= 2 ? points : std::max(a.intervals(), b.intervals()) + 1;
    return sample_on(lo, hi, m, [&](double x) { return a.u_at(x) - b.u_at(x); });
}

ZeroCountSeries zero_count_series(std::span<const double> times, std::span<const SampledFunction> samples,
                                  const ZeroCountOptions& options) {
    if (times.size() != samples.size()) throw std::invalid_argument("zero_count_series: length mismatch");
    ZeroCountSeries series;
    int left = 0, right = 0;
    for (std::size_t k = 0; k < times.size(); ++k) {
        if (k > 0 && !(times[k] > times[k - 1])) {
            throw std::invalid_argument("zero_count_series: times must increase strictly");
        }
        const auto& s = samples[k];
        double peak = 0.0;
        for (double w : s.ws) peak = std::max(peak, std::abs(w));
        const double tol = std::max(options.tol_rel * peak, options.tol_floor);
        const Scan sc = scan(s.xs, s.ws, tol, options.slope_tol);
        series.times.push_back(times[k]);
        series.counts.push_back(sc.sign_changes);
        series.degenerate.push_back(sc.degenerate);
        series.endpoint_hits.push_back(sc.endpoint_hit);
        series.boundary_events.push_back(k > 0 && (sc.left_sign != left || sc.right_sign != right));
        left = sc.left_sign;
        right = sc.right_sign;
        series.patterns.push_back(sc.pattern.pattern);
    }
    return series;
}

NonincreaseCheck check_nonincrease(const ZeroCountSeries& series, int window) {
    NonincreaseCheck check;
    const int n = static_cast<int>(series.counts.size());
    for (int i = 1; i < n; ++i) {
        if (series.counts[i] > series.counts[i - 1]) ++check.increases;
        if (series.counts[i] < series.counts[i - 1]) {
            ++check.drops;
            bool flagged = false;
            bool boundary = false;
            for (int j = std::max(0, i - 1 - window); j <= std::min(n - 1, i + window); ++j) {
                flagged = flagged || series.degenerate[j];
                boundary = boundary || (j < static_cast<int>(series.boundary_events.size()) && series.boundary_events[j]);
            }
            if (!flagged && boundary) ++check.boundary_drops;
            if (!flagged && !boundary) ++check.unflagged_drops;
        }
    }
    return check;
}

std::string to_csv(const ZeroCountSeries& series) {
    std::string out = "t,count,degenerate\n";
    char buf[64];
    for (std::size_t i = 0; i < series.times.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%d,%d\n", series.times[i], series.counts[i],
                      series.degenerate[i] ? 1 : 0);
        out += buf;
    }
    return out;
}

}  // namespace frontlab
