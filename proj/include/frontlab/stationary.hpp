#pragma once

#include "frontlab/nonlinearity.hpp"
#include "frontlab/numerics.hpp"

#include <limits>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace frontlab {

/// Even ground state of V'' + f(V) = 0 with V'(0) = 0 and V(+inf) = 0 (bistable f).
struct GroundState {
    double v0 = 0.0;
    double lambda0 = 0.0;
    double A0 = 0.0;
    double A = 0.0;
    double theta = 0.0;
    /// V on [0, x_back]; beyond that V = A e^{-x / lambda0}.
    HermiteSampler profile;
    std::shared_ptr<const Nonlinearity> nl;

    double V(double x) const;
    double V_prime(double x) const;
    /// x >= 0 with V(x) = level, by quadrature of dx = -dV / sqrt(F(V)).
    double x_of(double level) const;
};

/// Throws std::domain_error unless nl is bistable with a zero of F in (theta, 1).
GroundState ground_state(const Nonlinearity& nl);

/// The unique xi > 0 with V(xi) = m / t; requires t > m / V(0).
double xi_m(const GroundState& gs, double m, double t);
/// d xi_m / dt = m / (t^2 sqrt(F(m / t))).
double xi_m_prime(const GroundState& gs, double m, double t);

/// Largest rho in (0, theta) with f < 0 and f' < f'(0)/2 on (0, rho).
double barrier_rho(const Nonlinearity& nl);

/// Combustion bump: V_b(0) = theta + b, V_b(l) = theta, linear from (l, theta) to (L, 0).
struct BumpProfile {
    double b = 0.0;
    double theta = 0.0;
    double l = 0.0;
    double L = 0.0;
    double slope = 0.0;  ///< V_b'(l) = -sqrt(G(b))
    HermiteSampler inner;  ///< V_b on [0, l]
    std::shared_ptr<const Nonlinearity> nl;

    double V(double x) const;
    double V_prime(double x) const;
};

/// Throws std::domain_error unless nl is combustion and 0 < b < (1 - theta) / 2.
BumpProfile bump(const Nonlinearity& nl, double b);

struct InequalityResidual {
    std::string name;
    std::string sense;  ///< "<= 0" or ">= 0"
    double onset = std::numeric_limits<double>::infinity();
    double worst_wrong = 0.0;  ///< largest wrong-signed magnitude over the whole grid
    double extreme = 0.0;      ///< residual closest to the wrong side at t >= onset
    int evaluated = 0;
    int violations = 0;        ///< wrong-signed evaluations over the whole grid
    bool passed = false;
};

struct ResidualReport {
    double m = 0.0;
    double m1 = 0.0;
    double mu = 0.0;
    double x0 = 0.0;
    double rho = 0.0;
    double onset = std::numeric_limits<double>::infinity();
    std::vector<InequalityResidual> checks;

    bool passed() const;
    const InequalityResidual* find(const std::string& name) const;
    std::string to_text() const;
};

/// Evaluates the lower barrier V(x + x0 + 1) - m/t on [M0, xi_m(t) - x0 - 1) and the upper barrier
/// V(x + x0 - 1) + m1/t glued to a linear tail of width 2 lambda0 / 3 on the supplied grids.
/// x_grid holds fractions in [0, 1] of each piece's interval. Checks:
///   lower_pde, lower_front, upper_pde_profile, upper_pde_linear, upper_kink, upper_front.
/// Each check's onset is found by doubling from the first grid time; grid times where a piece is not
/// yet defined count as violations.
ResidualReport barrier_residuals(const GroundState& gs, double mu, double m, double m1,
                                 std::span<const double> t_grid, std::span<const double> x_grid,
                                 double x0 = 0.0);

}  // namespace frontlab
