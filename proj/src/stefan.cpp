#include "frontlab/stefan.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace frontlab {

double erf_scaled(double x) { return std::erf(x); }

double xi0_equation_lhs(double xi) {
    // \int_0^xi e^{-s^2} ds = (sqrt(pi)/2) E(xi)
    return std::sqrt(std::numbers::pi) * xi * std::exp(xi * xi) * erf_scaled(xi);
}

double solve_xi0(double mu, double theta) {
    const double target = mu * theta;
    if (!(target > 0.0) || !std::isfinite(target)) {
        throw std::invalid_argument("solve_xi0: mu*theta must be positive");
    }
    double lo = 0.0;
    double hi = 1.0;
    while (xi0_equation_lhs(hi) < target) {
        lo = hi;
        hi *= 2.0;
        if (hi > 64.0) throw std::invalid_argument("solve_xi0: mu*theta out of range");
    }
    // Bisect past the 1e-13 width until the bracket cannot be split further.
    for (;;) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (xi0_equation_lhs(mid) < target) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return std::abs(xi0_equation_lhs(lo) - target) <= std::abs(xi0_equation_lhs(hi) - target) ? lo : hi;
}

StefanExact::StefanExact(double mu, double theta)
    : mu_(mu), theta_(theta), xi0_(solve_xi0(mu, theta)), e_xi0_(erf_scaled(xi0_)) {}

double StefanExact::rho(double t) const { return 2.0 * xi0_ * std::sqrt(t); }

double StefanExact::rho_prime(double t) const { return xi0_ / std::sqrt(t); }

PhiValue StefanExact::phi(double t, double x) const {
    PhiValue out;
    out.value = theta_ / e_xi0_ * (e_xi0_ - erf_scaled(x / (2.0 * std::sqrt(t))));
    out.beyond_front = x > rho(t);
    return out;
}

double StefanExact::phi_x(double t, double x) const {
    const double eta = x / (2.0 * std::sqrt(t));
    return -theta_ / e_xi0_ * std::exp(-eta * eta) / std::sqrt(std::numbers::pi * t);
}

double StefanExact::phi_xx(double t, double x) const {
    const double eta = x / (2.0 * std::sqrt(t));
    return theta_ / e_xi0_ * eta * std::exp(-eta * eta) / (std::sqrt(std::numbers::pi) * t);
}

double StefanExact::phi_t(double t, double x) const {
    // d/dt of -theta/E0 · E(x / (2 sqrt t)) = theta/E0 · (2/sqrt pi) e^{-eta^2} · x / (4 t^{3/2})
    const double eta = x / (2.0 * std::sqrt(t));
    return theta_ / e_xi0_ * (2.0 / std::sqrt(std::numbers::pi)) * std::exp(-eta * eta) * x /
           (4.0 * t * std::sqrt(t));
}

double StefanExact::level_position(double t, double level) const {
    if (!(level > 0.0 && level < theta_)) throw std::invalid_argument("level_position: level outside (0, theta)");
    double lo = 0.0, hi = rho(t);
    for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (phi(t, mid).value > level) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

PhiValue exact_phi(const StefanExact& se, double t, double x) { return se.phi(t, x); }

double verify_heat_residual(const StefanExact& se, std::span<const double> t_grid,
                            std::span<const double> x_fractions) {
    double worst = 0.0;
    for (double t : t_grid) {
        if (!(t > 0.0)) throw std::invalid_argument("verify_heat_residual: t must be positive");
        for (double frac : x_fractions) {
            if (!(frac > 0.0 && frac < 1.0)) {
                throw std::invalid_argument("verify_heat_residual: x fractions must lie in (0,1)");
            }
            const double x = frac * se.rho(t);
            worst = std::max(worst, std::abs(se.phi_t(t, x) - se.phi_xx(t, x)));
        }
    }
    return worst;
}

}  // namespace frontlab
