#pragma once

#include <span>

namespace frontlab {

/// E(x) = (2/sqrt(pi)) \int_0^x e^{-s^2} ds.
double erf_scaled(double x);

/// Left-hand side of the xi_0 equation: 2 xi e^{xi^2} \int_0^xi e^{-s^2} ds.
double xi0_equation_lhs(double xi);

/// Unique xi_0 > 0 with xi0_equation_lhs(xi_0) = mu·theta, by bisection.
double solve_xi0(double mu, double theta);

struct PhiValue {
    double value = 0.0;
    bool beyond_front = false;  ///< x > rho(t); value is negative there.
};

/// Self-similar one-phase Stefan solution with Dirichlet level theta at x = 0.
class StefanExact {
public:
    StefanExact(double mu, double theta);

    double xi0() const { return xi0_; }
    double mu() const { return mu_; }
    double theta() const { return theta_; }

    double rho(double t) const;
    double rho_prime(double t) const;

    PhiValue phi(double t, double x) const;
    double phi_x(double t, double x) const;
    double phi_xx(double t, double x) const;
    double phi_t(double t, double x) const;

    /// x in (0, rho(t)) with Phi(t, x) = level, level in (0, theta).
    double level_position(double t, double level) const;

private:
    double mu_;
    double theta_;
    double xi0_;
    double e_xi0_;
};

PhiValue exact_phi(const StefanExact& se, double t, double x);

/// max |Phi_t - Phi_xx| over t_grid × (x_fractions · rho(t)), analytic derivatives.
double verify_heat_residual(const StefanExact& se, std::span<const double> t_grid,
                            std::span<const double> x_fractions);

}  // namespace frontlab
