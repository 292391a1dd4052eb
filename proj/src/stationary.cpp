#include "frontlab/stationary.hpp"

#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace frontlab {

namespace {

constexpr std::size_t kKnots = 2000;
constexpr double kProfileSpan = 25.0;  // in units of lambda0

double toms748(const std::function<double(double)>& fn, double lo, double hi) {
    double flo = fn(lo), fhi = fn(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo > 0.0) == (fhi > 0.0)) throw std::runtime_error("root bracket does not change sign");
    std::uintmax_t iters = 200;
    auto [a, b] = boost::math::tools::toms748_solve(fn, lo, hi, flo, fhi,
                                                    boost::math::tools::eps_tolerance<double>(52), iters);
    return 0.5 * (a + b);
}

// Distance from the top: x(v0 - tau^2) = \int_0^tau 2 s / sqrt(F(v0 - s^2) - F(v0)) ds.
double upper_distance(const Nonlinearity& nl, double v0, double f_top, double tau) {
    if (tau <= 0.0) return 0.0;
    return gauss_legendre_integrate(
        [&](double s) {
            const double gap = potential_F(nl, v0 - s * s) - f_top;
            return 2.0 * s / std::sqrt(gap);
        },
        0.0, tau);
}

// \int_{e^w}^{e^{w_top}} ds / sqrt(F(s)) in the log variable.
double lower_distance(const Nonlinearity& nl, double w, double w_top) {
    if (w >= w_top) return 0.0;
    return gauss_legendre_integrate(
        [&](double omega) {
            const double s = std::exp(omega);
            return s / std::sqrt(potential_F(nl, s));
        },
        w, w_top);
}

}  // namespace

double GroundState::V(double x) const { return profile(std::abs(x)); }

double GroundState::V_prime(double x) const {
    const double d = profile.derivative(std::abs(x));
    return x < 0.0 ? -d : d;
}

double GroundState::x_of(double level) const {
    if (!(level > 0.0 && level <= v0)) throw std::invalid_argument("x_of: level outside (0, V(0)]");
    const double f_top = potential_F(*nl, v0);
    const double half = 0.5 * v0;
    if (level >= half) return upper_distance(*nl, v0, f_top, std::sqrt(v0 - level));
    return upper_distance(*nl, v0, f_top, std::sqrt(half)) + lower_distance(*nl, std::log(level), std::log(half));
}

GroundState ground_state(const Nonlinearity& nl) {
    if (nl.behaves_as() != NonlinearityKind::bistable) {
        throw std::domain_error("ground_state: nonlinearity is not bistable");
    }
    GroundState gs;
    gs.nl = std::make_shared<const Nonlinearity>(nl);
    gs.theta = nl.theta();
    gs.lambda0 = lambda0(nl);
    const double th = gs.theta;
    if (!(nl.primitive(1.0) > 0.0)) throw std::domain_error("ground_state: F has no zero in (theta, 1)");
    gs.v0 = toms748([&](double u) { return nl.primitive(u); }, th, 1.0);

    const double v0 = gs.v0;
    const double lam = gs.lambda0;
    const double half = 0.5 * v0;
    const double f_top = potential_F(nl, v0);
    const double tau_half = std::sqrt(half);
    const double x_half = upper_distance(nl, v0, f_top, tau_half);

    const double upper_part = x_half - lam * std::log(2.0);
    const double lower_part = gauss_legendre_integrate(
        [&](double s) { return 1.0 / std::sqrt(potential_F(nl, s)) - lam / s; }, 0.0, half);
    gs.A0 = upper_part + lower_part;
    gs.A = v0 * std::exp(gs.A0 / lam);

    const double x_end = kProfileSpan * lam;
    const double w_top = std::log(half);
    const double w_floor = std::log(gs.A) - x_end / lam - 20.0;

    std::vector<double> xs(kKnots), vs(kKnots), ds(kKnots), cs(kKnots);
    for (std::size_t k = 0; k < kKnots; ++k) {
        const double x = x_end * static_cast<double>(k) / static_cast<double>(kKnots - 1);
        double v = v0;
        if (k == 0) {
            v = v0;
        } else if (x <= x_half) {
            const double tau = toms748([&](double t) { return upper_distance(nl, v0, f_top, t) - x; }, 0.0,
                                       tau_half);
            v = v0 - tau * tau;
        } else {
            const double w =
                toms748([&](double w) { return x_half + lower_distance(nl, w, w_top) - x; }, w_floor, w_top);
            v = std::exp(w);
        }
        xs[k] = x;
        vs[k] = v;
        ds[k] = k == 0 ? 0.0 : -std::sqrt(std::max(0.0, potential_F(nl, v) - f_top));
        cs[k] = -nl(v);
    }
    gs.profile = HermiteSampler(std::move(xs), std::move(vs), std::move(ds), std::move(cs));
    const double A = gs.A;
    gs.profile.tail_value = [A, lam](double x) { return A * std::exp(-x / lam); };
    gs.profile.tail_slope = [A, lam](double x) { return -A / lam * std::exp(-x / lam); };
    return gs;
}

double xi_m(const GroundState& gs, double m, double t) {
    if (!(m > 0.0) || !(t > m / gs.v0)) throw std::invalid_argument("xi_m: requires m > 0 and t > m / V(0)");
    const double level = m / t;
    const auto& p = gs.profile;
    if (level < p.ys().back()) return gs.lambda0 * std::log(gs.A / level);
    double lo = 0.0, hi = p.x_back();
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (p(mid) > level) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

double xi_m_prime(const GroundState& gs, double m, double t) {
    const double level = m / t;
    return m / (t * t * std::sqrt(potential_F(*gs.nl, level)));
}

double barrier_rho(const Nonlinearity& nl) {
    const double th = nl.theta();
    const double half_slope = 0.5 * nl.f_prime(0.0);
    auto ok = [&](double s) { return nl(s) < 0.0 && nl.f_prime(s) < half_slope; };
    const int n = 4000;
    double lo = 0.0, hi = th;
    for (int i = 1; i <= n; ++i) {
        const double s = th * i / n;
        if (!ok(s)) {
            hi = s;
            break;
        }
        lo = s;
    }
    for (int i = 0; i < 100 && hi - lo > 1e-15; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (ok(mid)) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return lo;
}

double BumpProfile::V(double x) const {
    x = std::abs(x);
    if (x <= l) return inner(x);
    if (x >= L) return 0.0;
    return theta + slope * (x - l);
}

double BumpProfile::V_prime(double x) const {
    const double ax = std::abs(x);
    double d = 0.0;
    if (ax <= l) {
        d = inner.derivative(ax);
    } else if (ax < L) {
        d = slope;
    }
    return x < 0.0 ? -d : d;
}

BumpProfile bump(const Nonlinearity& nl, double b) {
    if (nl.behaves_as() != NonlinearityKind::combustion) {
        throw std::domain_error("bump: nonlinearity is not combustion");
    }
    const double th = nl.theta();
    if (!(b > 0.0 && b < 0.5 * (1.0 - th))) throw std::domain_error("bump: b outside (0, (1 - theta)/2)");
    BumpProfile bp;
    bp.b = b;
    bp.theta = th;
    bp.nl = std::make_shared<const Nonlinearity>(nl);

    // x(theta + b - tau^2) = \int_0^tau 2 s / sqrt(G(b) - G(b - s^2)) ds.
    auto distance = [&](double tau) {
        if (tau <= 0.0) return 0.0;
        return gauss_legendre_integrate(
            [&](double s) { return 2.0 * s / std::sqrt(shifted_potential_gap(nl, b, b - s * s)); }, 0.0, tau);
    };
    const double tau_end = std::sqrt(b);
    bp.l = distance(tau_end);
    const double g_b = shifted_potential_G(nl, b);
    bp.slope = -std::sqrt(g_b);
    bp.L = bp.l + th / std::sqrt(g_b);

    std::vector<double> xs(kKnots), vs(kKnots), ds(kKnots), cs(kKnots);
    for (std::size_t k = 0; k < kKnots; ++k) {
        const double x = bp.l * static_cast<double>(k) / static_cast<double>(kKnots - 1);
        double tau = 0.0;
        if (k + 1 == kKnots) {
            tau = tau_end;
        } else if (k > 0) {
            tau = toms748([&](double t) { return distance(t) - x; }, 0.0, tau_end);
        }
        const double u = b - tau * tau;
        xs[k] = x;
        vs[k] = th + u;
        ds[k] = k == 0 ? 0.0 : -std::sqrt(std::max(0.0, shifted_potential_gap(nl, b, u)));
        cs[k] = -nl(th + u);
    }
    ds.back() = bp.slope;
    bp.inner = HermiteSampler(std::move(xs), std::move(vs), std::move(ds), std::move(cs));
    return bp;
}

bool ResidualReport::passed() const {
    return !checks.empty() && std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

const InequalityResidual* ResidualReport::find(const std::string& name) const {
    for (const auto& c : checks) {
        if (c.name == name) return &c;
    }
    return nullptr;
}

std::string ResidualReport::to_text() const {
    std::ostringstream os;
    os.precision(10);
    os << "m = " << m << ", m1 = " << m1 << ", mu = " << mu << ", x0 = " << x0 << ", rho = " << rho << "\n";
    os << "onset = " << onset << "\n";
    for (const auto& c : checks) {
        os << c.name << " (" << c.sense << "): " << (c.passed ? "pass" : "FAIL") << ", onset " << c.onset
           << ", worst wrong-signed " << c.worst_wrong << ", extreme " << c.extreme << ", violations "
           << c.violations << "/" << c.evaluated << "\n";
    }
    return os.str();
}

namespace {

// Residuals oriented so that <= 0 is the correct sign; an empty slot marks an undefined piece.
struct CheckSeries {
    std::string name;
    std::string sense;
    std::vector<std::vector<double>> per_time;  // oriented residuals, empty = undefined
};

InequalityResidual summarize(const CheckSeries& series, std::span<const double> t_grid) {
    InequalityResidual r;
    r.name = series.name;
    r.sense = series.sense;
    const double sign = series.sense == ">= 0" ? -1.0 : 1.0;
    auto bad_at = [&](std::size_t i) {
        const auto& vals = series.per_time[i];
        if (vals.empty()) return true;
        return std::any_of(vals.begin(), vals.end(), [](double v) { return !(v <= 0.0); });
    };
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        r.evaluated += static_cast<int>(std::max<std::size_t>(1, series.per_time[i].size()));
        if (series.per_time[i].empty()) {
            ++r.violations;
            continue;
        }
        for (double v : series.per_time[i]) {
            if (v <= 0.0) continue;
            ++r.violations;
            r.worst_wrong = std::max(r.worst_wrong, std::isfinite(v) ? v : std::numeric_limits<double>::infinity());
        }
    }
    if (t_grid.empty()) return r;
    double onset = t_grid.front();
    for (;;) {
        bool clean = true;
        bool any = false;
        for (std::size_t i = 0; i < t_grid.size(); ++i) {
            if (t_grid[i] < onset) continue;
            any = true;
            if (bad_at(i)) {
                clean = false;
                break;
            }
        }
        if (!any) return r;
        if (clean) break;
        onset *= 2.0;
    }
    r.onset = onset;
    int beyond = 0;
    r.extreme = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        if (t_grid[i] < onset) continue;
        ++beyond;
        for (double v : series.per_time[i]) r.extreme = std::max(r.extreme, v);
    }
    r.extreme *= sign;
    r.passed = beyond >= 2;
    return r;
}

}  // namespace

ResidualReport barrier_residuals(const GroundState& gs, double mu, double m, double m1,
                                 std::span<const double> t_grid, std::span<const double> x_grid, double x0) {
    if (!(mu > 0.0) || !(m > 0.0) || !(m1 > 0.0)) {
        throw std::invalid_argument("barrier_residuals: mu, m, m1 must be positive");
    }
    for (std::size_t i = 1; i < t_grid.size(); ++i) {
        if (!(t_grid[i] > t_grid[i - 1])) throw std::invalid_argument("barrier_residuals: t_grid not increasing");
    }
    for (double frac : x_grid) {
        if (!(frac >= 0.0 && frac <= 1.0)) throw std::invalid_argument("barrier_residuals: x_grid outside [0, 1]");
    }
    const Nonlinearity& nl = *gs.nl;
    const double lam = gs.lambda0;
    ResidualReport report;
    report.m = m;
    report.m1 = m1;
    report.mu = mu;
    report.x0 = x0;
    report.rho = barrier_rho(nl);
    const double lower_start = gs.x_of(report.rho) - x0 - 1.0;
    const double upper_start = gs.x_of(report.rho) - x0 + 1.0;

    CheckSeries lower_pde{"lower_pde", "<= 0", {}};
    CheckSeries lower_front{"lower_front", "<= 0", {}};
    CheckSeries upper_profile{"upper_pde_profile", ">= 0", {}};
    CheckSeries upper_linear{"upper_pde_linear", ">= 0", {}};
    CheckSeries upper_kink{"upper_kink", "<= 0", {}};
    CheckSeries upper_front{"upper_front", "<= 0", {}};

    for (double t : t_grid) {
        std::vector<double> lp, lf, up, ul, uk, uf;
        if (t > m / gs.v0) {
            const double h_low = xi_m(gs, m, t) - x0 - 1.0;
            if (h_low > lower_start) {
                for (double frac : x_grid) {
                    const double x = lower_start + frac * (h_low - lower_start);
                    const double v = gs.V(x + x0 + 1.0);
                    lp.push_back(m / (t * t) + nl(v) - nl(v - m / t));
                }
                lf.push_back(xi_m_prime(gs, m, t) - mu * std::sqrt(potential_F(nl, m / t)));
            }
        }
        if (t > m1 / gs.v0) {
            const double xi1 = xi_m(gs, m1, t);
            const double kink = xi1 - x0 + 1.0;
            const double h_up = kink + 2.0 * lam / 3.0;
            const double xi1p = xi_m_prime(gs, m1, t);
            if (kink > upper_start) {
                for (double frac : x_grid) {
                    const double x = upper_start + frac * (kink - upper_start);
                    const double v = gs.V(x + x0 - 1.0);
                    up.push_back(-(-m1 / (t * t) + nl(v) - nl(v + m1 / t)));
                }
            }
            for (double frac : x_grid) {
                const double x = kink + frac * (h_up - kink);
                const double vbar = 3.0 / lam * m1 / t * (h_up - x);
                const double vt = -3.0 / lam * m1 / (t * t) * (h_up - x) + 3.0 / lam * m1 / t * xi1p;
                ul.push_back(-(vt - nl(vbar)));
            }
            uk.push_back(-3.0 * m1 / (lam * t) + std::sqrt(potential_F(nl, m1 / t)));
            uf.push_back(3.0 * mu * m1 / (lam * t) - xi1p);
        }
        lower_pde.per_time.push_back(std::move(lp));
        lower_front.per_time.push_back(std::move(lf));
        upper_profile.per_time.push_back(std::move(up));
        upper_linear.per_time.push_back(std::move(ul));
        upper_kink.per_time.push_back(std::move(uk));
        upper_front.per_time.push_back(std::move(uf));
    }

    for (const auto* series : {&lower_pde, &lower_front, &upper_profile, &upper_linear, &upper_kink, &upper_front}) {
        report.checks.push_back(summarize(*series, t_grid));
    }
    report.onset = 0.0;
    for (const auto& c : report.checks) report.onset = std::max(report.onset, c.onset);
    return report;
}

}  // namespace frontlab
