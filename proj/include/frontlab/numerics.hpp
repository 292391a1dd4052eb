#pragma once

#include <boost/math/interpolators/cubic_hermite.hpp>
#include <boost/math/interpolators/quintic_hermite.hpp>

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace frontlab {

/// Fixed-order Gauss–Legendre rule on [-1, 1]; nodes are cached per order.
struct GaussLegendreRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

const GaussLegendreRule& gauss_legendre(std::size_t order);

/// Integrates `fn` over [a, b] with the cached rule of the given order.
double gauss_legendre_integrate(const std::function<double(double)>& fn, double a, double b,
                                std::size_t order = 256);

/// Solves a tridiagonal system in place (Thomas algorithm).
/// `lower[0]` and `upper[n-1]` are ignored. `rhs` is overwritten with the solution.
void solve_tridiagonal(std::span<const double> lower, std::span<const double> diag,
                       std::span<const double> upper, std::span<double> rhs);

/// Piecewise-linear interpolation on strictly increasing abscissae, constant outside.
double interp_linear(std::span<const double> xs, std::span<const double> ys, double x);

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double rms = 0.0;
};

/// Ordinary least squares y ≈ slope·x + intercept.
LineFit fit_line(std::span<const double> xs, std::span<const double> ys);

/// Profile sampler: Hermite interpolation through (x, y, dy/dx) knots, quintic when second
/// derivatives are supplied. Outside the knot range the optional tail callbacks take over.
class HermiteSampler {
public:
    HermiteSampler() = default;
    HermiteSampler(std::vector<double> xs, std::vector<double> ys, std::vector<double> slopes);
    HermiteSampler(std::vector<double> xs, std::vector<double> ys, std::vector<double> slopes,
                   std::vector<double> curvatures);

    double operator()(double x) const;
    double derivative(double x) const;

    double x_front() const { return xs_.front(); }
    double x_back() const { return xs_.back(); }
    std::size_t size() const { return xs_.size(); }
    std::span<const double> xs() const { return xs_; }
    std::span<const double> ys() const { return ys_; }
    std::span<const double> slopes() const { return slopes_; }

    std::function<double(double)> tail_value;
    std::function<double(double)> tail_slope;

private:
    using Cubic = boost::math::interpolators::cubic_hermite<std::vector<double>>;
    using Quintic = boost::math::interpolators::quintic_hermite<std::vector<double>>;

    void check_knots(std::size_t extra) const;

    std::optional<Cubic> cubic_;
    std::optional<Quintic> quintic_;
    std::vector<double> xs_;
    std::vector<double> ys_;
    std::vector<double> slopes_;
};

}  // namespace frontlab
