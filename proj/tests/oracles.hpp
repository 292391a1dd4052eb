#pragma once

#include "frontlab/nonlinearity.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <stdexcept>
#include <vector>

namespace oracle {

/// \int_0^x e^{-s^2} ds by composite Simpson on 20000 panels.
inline double gauss_integral(double x) {
    const int n = 20000;
    const double h = x / n;
    double s = 1.0 + std::exp(-x * x);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * std::exp(-(i * h) * (i * h));
    return s * h / 3.0;
}

/// Root of 2 xi e^{xi^2} \int_0^xi e^{-s^2} ds = target by bisection.
inline double xi0(double target) {
    double lo = 0.0, hi = 5.0;
    while (hi - lo > 1e-14) {
        const double mid = 0.5 * (lo + hi);
        (2.0 * mid * std::exp(mid * mid) * gauss_integral(mid) < target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

/// Finite-difference Newton solve of q'' - c q' + f(q) = 0 on [0, Z] with q(0) = 0, mu q'(0) = c and
/// the linearized far-field condition q'(Z) = -lambda(c) (1 - q(Z)), unknowns (q_1..q_M, c).
inline double collocation_c(const frontlab::Nonlinearity& nl, double mu, double Z, int M, double c_guess) {
    const double h = Z / M;
    const double d1 = nl.f_prime(1.0);
    Eigen::VectorXd x(M + 1);
    for (int i = 1; i <= M; ++i) x(i - 1) = 1.0 - std::exp(-(i * h));
    x(M) = c_guess;
    auto q = [&](int i) { return i == 0 ? 0.0 : x(i - 1); };
    for (int it = 0; it < 50; ++it) {
        const double c = x(M);
        const double root = std::sqrt(c * c - 4.0 * d1);
        const double lam = 0.5 * (c - root);
        const double dlam = 0.5 * (1.0 - c / root);
        Eigen::VectorXd r(M + 1);
        std::vector<Eigen::Triplet<double>> J;
        auto add = [&](int row, int i, double v) {
            if (i >= 1) J.emplace_back(row, i - 1, v);
        };
        for (int i = 1; i < M; ++i) {
            const int row = i - 1;
            const double qm = q(i - 1), q0 = q(i), qp = q(i + 1);
            r(row) = (qp - 2 * q0 + qm) / (h * h) - c * (qp - qm) / (2 * h) + nl(q0);
            add(row, i - 1, 1 / (h * h) + c / (2 * h));
            add(row, i, -2 / (h * h) + nl.f_prime(q0));
            add(row, i + 1, 1 / (h * h) - c / (2 * h));
            J.emplace_back(row, M, -(qp - qm) / (2 * h));
        }
        const double qM = q(M), qM1 = q(M - 1), qM2 = q(M - 2);
        r(M - 1) = (3 * qM - 4 * qM1 + qM2) / (2 * h) + lam * (1 - qM);
        add(M - 1, M, 3 / (2 * h) - lam);
        add(M - 1, M - 1, -4 / (2 * h));
        add(M - 1, M - 2, 1 / (2 * h));
        J.emplace_back(M - 1, M, dlam * (1 - qM));
        r(M) = mu * (-3 * q(0) + 4 * q(1) - q(2)) / (2 * h) - c;
        add(M, 1, 4 * mu / (2 * h));
        add(M, 2, -mu / (2 * h));
        J.emplace_back(M, M, -1.0);
        Eigen::SparseMatrix<double> A(M + 1, M + 1);
        A.setFromTriplets(J.begin(), J.end());
        Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
        lu.compute(A);
        if (lu.info() != Eigen::Success) throw std::runtime_error("collocation: singular Jacobian");
        const Eigen::VectorXd dx = lu.solve(r);
        x -= dx;
        if (dx.norm() < 1e-13) return x(M);
    }
    throw std::runtime_error("collocation: Newton did not converge");
}

/// Richardson-extrapolated collocation speed on [0, 40].
inline double semiwave_speed(const frontlab::Nonlinearity& nl, double mu, double c_guess) {
    const double Z = 40.0;
    const double coarse = collocation_c(nl, mu, Z, 4000, c_guess);
    const double fine = collocation_c(nl, mu, Z, 8000, coarse);
    return (4.0 * fine - coarse) / 3.0;
}

/// Distance to the right endpoint b, taken from the tanh-sinh complement near b.
inline double dist_right(double b, double s, double sc) { return sc > 0.0 ? sc : b - s; }

/// G(b) - G(s) for the theta = 0.5 combustion term, G(u) = u^3 / 3 - u^4 / 2, with d = b - s.
inline double G_gap(double b, double s, double d) {
    return d * ((b * b + b * s + s * s) / 3.0 - (b + s) * (b * b + s * s) / 2.0);
}

/// l(b) = \int_0^b ds / sqrt(G(b) - G(s)) for the theta = 0.5 combustion term.
inline double bump_l(double b) {
    boost::math::quadrature::tanh_sinh<double> q;
    return q.integrate([&](double s, double sc) { return 1.0 / std::sqrt(G_gap(b, s, dist_right(b, s, sc))); }, 0.0, b);
}

}  // namespace oracle
