#include "frontlab/numerics.hpp"

#include <gsl/gsl_integration.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace frontlab {

const GaussLegendreRule& gauss_legendre(std::size_t order) {
    static std::mutex mutex;
    static std::map<std::size_t, GaussLegendreRule> cache;
    std::lock_guard lock(mutex);
    auto it = cache.find(order);
    if (it != cache.end()) return it->second;

    gsl_integration_glfixed_table* table = gsl_integration_glfixed_table_alloc(order);
    if (table == nullptr) throw std::runtime_error("gauss_legendre: table allocation failed");
    GaussLegendreRule rule;
    rule.nodes.resize(order);
    rule.weights.resize(order);
    for (std::size_t i = 0; i < order; ++i) {
        gsl_integration_glfixed_point(-1.0, 1.0, i, &rule.nodes[i], &rule.weights[i], table);
    }
    gsl_integration_glfixed_table_free(table);
    return cache.emplace(order, std::move(rule)).first->second;
}

double gauss_legendre_integrate(const std::function<double(double)>& fn, double a, double b,
                                std::size_t order) {
    const auto& rule = gauss_legendre(order);
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    double sum = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        sum += rule.weights[i] * fn(mid + half * rule.nodes[i]);
    }
    return half * sum;
}

void solve_tridiagonal(std::span<const double> lower, std::span<const double> diag,
                       std::span<const double> upper, std::span<double> rhs) {
    const std::size_t n = diag.size();
    if (n == 0) return;
    thread_local std::vector<double> c;
    c.resize(n);
    double denom = diag[0];
    c[0] = n > 1 ? upper[0] / denom : 0.0;
    rhs[0] /= denom;
    for (std::size_t i = 1; i < n; ++i) {
        denom = diag[i] - lower[i] * c[i - 1];
        c[i] = i + 1 < n ? upper[i] / denom : 0.0;
        rhs[i] = (rhs[i] - lower[i] * rhs[i - 1]) / denom;
    }
    for (std::size_t i = n - 1; i-- > 0;) {
        rhs[i] -= c[i] * rhs[i + 1];
    }
}

double interp_linear(std::span<const double> xs, std::span<const double> ys, double x) {
    if (xs.empty()) throw std::invalid_argument("interp_linear: empty table");
    if (x <= xs.front()) return ys.front();
    if (x >= xs.back()) return ys.back();
    auto it = std::upper_bound(xs.begin(), xs.end(), x);
    const std::size_t i = static_cast<std::size_t>(it - xs.begin()) - 1;
    const double w = (x - xs[i]) / (xs[i + 1] - xs[i]);
    return (1.0 - w) * ys[i] + w * ys[i + 1];
}

LineFit fit_line(std::span<const double> xs, std::span<const double> ys) {
    const std::size_t n = xs.size();
    if (n < 2 || ys.size() != n) throw std::invalid_argument("fit_line: need at least two points");
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (sxx <= 0.0) throw std::invalid_argument("fit_line: degenerate abscissae");
    LineFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = ys[i] - (fit.slope * xs[i] + fit.intercept);
        ss += r * r;
    }
    fit.rms = std::sqrt(ss / static_cast<double>(n));
    return fit;
}

void HermiteSampler::check_knots(std::size_t extra) const {
    if (xs_.size() < 2 || ys_.size() != xs_.size() || slopes_.size() != xs_.size() ||
        (extra != 0 && extra != xs_.size())) {
        throw std::invalid_argument("HermiteSampler: inconsistent knot arrays");
    }
    for (std::size_t i = 1; i < xs_.size(); ++i) {
        if (!(xs_[i] > xs_[i - 1])) throw std::invalid_argument("HermiteSampler: knots not increasing");
    }
}

HermiteSampler::HermiteSampler(std::vector<double> xs, std::vector<double> ys,
                               std::vector<double> slopes)
    : xs_(std::move(xs)), ys_(std::move(ys)), slopes_(std::move(slopes)) {
    check_knots(0);
    cubic_.emplace(std::vector<double>(xs_), std::vector<double>(ys_), std::vector<double>(slopes_));
}

HermiteSampler::HermiteSampler(std::vector<double> xs, std::vector<double> ys, std::vector<double> slopes,
                               std::vector<double> curvatures)
    : xs_(std::move(xs)), ys_(std::move(ys)), slopes_(std::move(slopes)) {
    check_knots(curvatures.size());
    quintic_.emplace(std::vector<double>(xs_), std::vector<double>(ys_), std::vector<double>(slopes_),
                     std::move(curvatures));
}

double HermiteSampler::operator()(double x) const {
    if (x > xs_.back() && tail_value) return tail_value(x);
    if (x <= xs_.front()) return ys_.front();
    if (x >= xs_.back()) return ys_.back();
    return quintic_ ? (*quintic_)(x) : (*cubic_)(x);
}

double HermiteSampler::derivative(double x) const {
    if (x > xs_.back() && tail_slope) return tail_slope(x);
    if (x < xs_.front() || x > xs_.back()) return 0.0;
    return quintic_ ? quintic_->prime(x) : cubic_->prime(x);
}

}  // namespace frontlab
