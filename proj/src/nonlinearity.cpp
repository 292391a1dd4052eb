#include "frontlab/nonlinearity.hpp"

#include <math.h>

#include <boost/math/interpolators/pchip.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>
#include <stdexcept>

namespace frontlab {

namespace {

constexpr double kZeroTol = 1e-12;
constexpr double kFdStep = 1e-6;

double param_or(const std::map<std::string, double>& params, const std::string& key, double fallback) {
    auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
}

void reject_unknown(const std::map<std::string, double>& params, std::initializer_list<const char*> known,
                    const char* what) {
    for (const auto& [key, value] : params) {
        bool ok = false;
        for (const char* k : known) ok = ok || key == k;
        if (!ok) throw std::invalid_argument(std::string(what) + ": unknown parameter '" + key + "'");
    }
}

// Records the worst wrong-signed sample of a sign condition.
struct SignAccumulator {
    bool passed = true;
    double worst = 0.0;
    void violate(double magnitude) {
        passed = false;
        worst = std::max(worst, magnitude);
    }
    ClassCheck as_check(std::string name) const { return {std::move(name), passed, worst}; }
};

}  // namespace

std::string to_string(NonlinearityKind kind) {
    switch (kind) {
        case NonlinearityKind::monostable: return "monostable";
        case NonlinearityKind::bistable: return "bistable";
        case NonlinearityKind::combustion: return "combustion";
        case NonlinearityKind::custom: return "custom";
    }
    return "custom";
}

NonlinearityKind nonlinearity_kind_from_string(const std::string& name) {
    if (name == "monostable") return NonlinearityKind::monostable;
    if (name == "bistable") return NonlinearityKind::bistable;
    if (name == "combustion") return NonlinearityKind::combustion;
    if (name == "custom") return NonlinearityKind::custom;
    throw std::invalid_argument("unknown nonlinearity kind '" + name + "'");
}

bool ValidationReport::passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const ClassCheck& c) { return c.passed; });
}

const ClassCheck* ValidationReport::find(const std::string& name) const {
    for (const auto& c : checks) {
        if (c.name == name) return &c;
    }
    return nullptr;
}

std::string ValidationReport::summary() const {
    std::ostringstream os;
    os << "class " << to_string(checked_as) << ": " << (passed() ? "pass" : "FAIL");
    for (const auto& c : checks) {
        if (!c.passed) os << "; " << c.name << " violated by " << c.worst_violation;
    }
    for (const auto& n : notes) os << "; " << n;
    return os.str();
}

double Nonlinearity::theta() const {
    if (!theta_) throw std::logic_error("nonlinearity has no theta");
    return *theta_;
}

double Nonlinearity::f_prime(double u) const {
    if (f_prime_) return (*f_prime_)(u);
    if (u - kFdStep < 0.0) {
        return (-3.0 * f_(u) + 4.0 * f_(u + kFdStep) - f_(u + 2.0 * kFdStep)) / (2.0 * kFdStep);
    }
    return (f_(u + kFdStep) - f_(u - kFdStep)) / (2.0 * kFdStep);
}

double Nonlinearity::primitive(double u) const {
    if (primitive_) return (*primitive_)(u);
    if (u == 0.0) return 0.0;
    double error = 0.0;
    const double value =
        boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f_, 0.0, u, 20, 1e-13, &error);
    return value;
}

void Nonlinearity::finish() {
    double scale = 0.0;
    for (int i = 0; i <= 400; ++i) {
        scale = std::max(scale, std::abs(f_prime(i / 400.0)));
    }
    derivative_scale_ = std::max(scale, 1e-12);
    if (behaves_as_ == NonlinearityKind::combustion && delta_ <= 0.0 && theta_) {
        // Widest sampled window above theta on which f is nondecreasing.
        const double th = *theta_;
        const int n = 2000;
        double last = f_(th);
        double width = 0.0;
        for (int i = 1; i <= n; ++i) {
            const double u = th + (1.0 - th) * i / n;
            const double v = f_(u);
            if (v < last) break;
            width = u - th;
            last = v;
        }
        delta_ = width;
    }
}

Nonlinearity Nonlinearity::make_builtin(NonlinearityKind kind, const std::map<std::string, double>& params) {
    Nonlinearity nl;
    nl.kind_ = kind;
    nl.behaves_as_ = kind;
    nl.builtin_ = true;
    nl.u_max_ = param_or(params, "u_max", 2.0);
    if (!(nl.u_max_ > 1.0)) throw std::invalid_argument("make_builtin: u_max must exceed 1");

    switch (kind) {
        case NonlinearityKind::bistable: {
            reject_unknown(params, {"a", "u_max"}, "bistable cubic");
            const double a = param_or(params, "a", 0.25);
            nl.theta_ = a;
            nl.params_ = {{"a", a}, {"u_max", nl.u_max_}};
            nl.f_ = [a](double u) { return u * (1.0 - u) * (u - a); };
            nl.f_prime_ = [a](double u) { return -3.0 * u * u + 2.0 * (1.0 + a) * u - a; };
            nl.primitive_ = [a](double u) {
                const double u2 = u * u;
                return -u2 * u2 / 4.0 + (1.0 + a) * u2 * u / 3.0 - a * u2 / 2.0;
            };
            break;
        }
        case NonlinearityKind::combustion: {
            reject_unknown(params, {"theta", "u_max"}, "combustion");
            const double th = param_or(params, "theta", 0.5);
            nl.theta_ = th;
            nl.delta_ = 2.0 * (1.0 - th) / 3.0;
            nl.params_ = {{"theta", th}, {"u_max", nl.u_max_}};
            nl.f_ = [th](double u) {
                if (u <= th) return 0.0;
                const double s = u - th;
                return s * s * (1.0 - u);
            };
            nl.f_prime_ = [th](double u) {
                if (u <= th) return 0.0;
                const double s = u - th;
                return 2.0 * s * (1.0 - u) - s * s;
            };
            nl.primitive_ = [th](double u) {
                if (u <= th) return 0.0;
                const double s = u - th;
                return (1.0 - th) * s * s * s / 3.0 - s * s * s * s / 4.0;
            };
            break;
        }
        case NonlinearityKind::monostable: {
            reject_unknown(params, {"u_max"}, "logistic");
            nl.params_ = {{"u_max", nl.u_max_}};
            nl.f_ = [](double u) { return u * (1.0 - u); };
            nl.f_prime_ = [](double u) { return 1.0 - 2.0 * u; };
            nl.primitive_ = [](double u) { return u * u / 2.0 - u * u * u / 3.0; };
            break;
        }
        case NonlinearityKind::custom:
            throw std::invalid_argument("make_builtin: custom has no builtin form");
    }
    nl.finish();
    const ValidationReport report = validate_class(nl);
    if (!report.passed()) {
        throw std::invalid_argument("make_builtin: " + report.summary());
    }
    return nl;
}

Nonlinearity Nonlinearity::make_tabulated(NonlinearityKind behaves_as,
                                          std::vector<std::pair<double, double>> table,
                                          std::optional<double> theta, double u_max) {
    if (behaves_as == NonlinearityKind::custom) {
        throw std::invalid_argument("make_tabulated: behaves_as must name a class");
    }
    std::sort(table.begin(), table.end());
    if (table.size() < 4) throw std::invalid_argument("make_tabulated: need at least 4 points");
    if (table.front().first != 0.0 || table.back().first < u_max) {
        throw std::invalid_argument("make_tabulated: table must cover [0, u_max]");
    }
    std::vector<double> us, fs;
    for (const auto& [u, v] : table) {
        if (!us.empty() && !(u > us.back())) throw std::invalid_argument("make_tabulated: duplicate abscissa");
        us.push_back(u);
        fs.push_back(v);
    }
    using Pchip = boost::math::interpolators::pchip<std::vector<double>>;
    auto spline = std::make_shared<Pchip>(std::vector<double>(us), std::vector<double>(fs));

    // Exact integral of the piecewise cubic: 2-point Gauss–Legendre per segment.
    auto cumulative = std::make_shared<std::vector<double>>(us.size(), 0.0);
    auto segment = [spline](double a, double b) {
        const double g = 1.0 / std::sqrt(3.0);
        const double m = 0.5 * (a + b), r = 0.5 * (b - a);
        return r * ((*spline)(m - r * g) + (*spline)(m + r * g));
    };
    for (std::size_t i = 1; i < us.size(); ++i) {
        (*cumulative)[i] = (*cumulative)[i - 1] + segment(us[i - 1], us[i]);
    }
    auto knots = std::make_shared<std::vector<double>>(us);
    const double u_hi = us.back();

    Nonlinearity nl;
    nl.kind_ = NonlinearityKind::custom;
    nl.behaves_as_ = behaves_as;
    nl.theta_ = theta;
    nl.u_max_ = u_max;
    nl.table_ = std::move(table);
    nl.params_ = {{"u_max", u_max}};
    if (theta) nl.params_["theta"] = *theta;
    nl.f_ = [spline, u_hi](double u) { return (*spline)(std::clamp(u, 0.0, u_hi)); };
    nl.f_prime_ = [spline, u_hi](double u) { return spline->prime(std::clamp(u, 0.0, u_hi)); };
    nl.primitive_ = [spline, cumulative, knots, segment, u_hi](double u) {
        u = std::clamp(u, 0.0, u_hi);
        auto it = std::upper_bound(knots->begin(), knots->end(), u);
        const std::size_t i = it == knots->begin() ? 0 : static_cast<std::size_t>(it - knots->begin()) - 1;
        if (i + 1 >= knots->size()) return cumulative->back();
        return (*cumulative)[i] + segment((*knots)[i], u);
    };
    nl.finish();
    const ValidationReport report = validate_class(nl);
    if (!report.passed()) throw std::invalid_argument("make_tabulated: " + report.summary());
    return nl;
}

Nonlinearity Nonlinearity::make_custom(NonlinearityKind behaves_as, ScalarMap f, std::optional<ScalarMap> f_prime,
                                       std::optional<double> theta, double u_max, bool validate) {
    Nonlinearity nl;
    nl.kind_ = NonlinearityKind::custom;
    nl.behaves_as_ = behaves_as;
    nl.theta_ = theta;
    nl.u_max_ = u_max;
    nl.f_ = std::move(f);
    nl.f_prime_ = std::move(f_prime);
    nl.params_ = {{"u_max", u_max}};
    if (theta) nl.params_["theta"] = *theta;
    nl.finish();
    if (validate) {
        const ValidationReport report = validate_class(nl);
        if (!report.passed()) throw std::invalid_argument("make_custom: " + report.summary());
    }
    return nl;
}

ValidationReport validate_class(const Nonlinearity& nl, int grid_points) {
    return validate_class(nl, nl.behaves_as(), grid_points);
}

ValidationReport validate_class(const Nonlinearity& nl, NonlinearityKind as_kind, int grid_points) {
    ValidationReport report;
    report.checked_as = as_kind;
    const int n = std::max(grid_points, 1000);
    const double u_max = nl.u_max();
    auto sample = [&](int i) { return u_max * static_cast<double>(i) / (n - 1); };

    auto zero_check = [&](const std::string& name, double u) {
        const double v = std::abs(nl(u));
        report.checks.push_back({name, v <= kZeroTol, v});
    };
    // Sign condition over the open interval (lo, hi): sign = +1 means f > 0 required.
    auto sign_check = [&](const std::string& name, double lo, double hi, int sign) {
        SignAccumulator acc;
        for (int i = 0; i < n; ++i) {
            const double u = sample(i);
            if (u <= lo || u >= hi) continue;
            const double v = nl(u);
            if (sign > 0 && !(v > 0.0)) acc.violate(-v);
            if (sign < 0 && !(v < 0.0)) acc.violate(v);
        }
        // Probe the interval midpoint too, so narrow intervals are never unchecked.
        const double mid = 0.5 * (lo + hi);
        const double v = nl(mid);
        if (sign > 0 && !(v > 0.0)) acc.violate(-v);
        if (sign < 0 && !(v < 0.0)) acc.violate(v);
        report.checks.push_back(acc.as_check(name));
    };
    auto derivative_check = [&](const std::string& name, double u, int sign) {
        const double d = nl.f_prime(u);
        const bool ok = sign > 0 ? d > 0.0 : d < 0.0;
        report.checks.push_back({name, ok, ok ? 0.0 : std::abs(d)});
    };

    zero_check("f(0)=0", 0.0);

    const bool theta_ok = nl.has_theta() && nl.theta() > 0.0 && nl.theta() < 1.0;
    switch (as_kind) {
        case NonlinearityKind::bistable: {
            if (!theta_ok) {
                // Look for an interior sign change, which a bistable term must have.
                bool found = false;
                double prev = nl(sample(1));
                for (int i = 2; i < n && sample(i) < 1.0; ++i) {
                    const double v = nl(sample(i));
                    if (prev < 0.0 && v > 0.0) found = true;
                    prev = v;
                }
                report.checks.push_back({"interior zero theta in (0,1)", false, 1.0});
                report.notes.push_back(found ? "theta not supplied" : "no interior zero theta");
                break;
            }
            const double th = nl.theta();
            report.checks.push_back({"interior zero theta in (0,1)", true, 0.0});
            zero_check("f(theta)=0", th);
            zero_check("f(1)=0", 1.0);
            sign_check("f<0 on (0,theta)", 0.0, th, -1);
            sign_check("f>0 on (theta,1)", th, 1.0, +1);
            sign_check("f<0 on (1,u_max)", 1.0, u_max, -1);
            derivative_check("f'(0)<0", 0.0, -1);
            derivative_check("f'(1)<0", 1.0, -1);
            const double integral = nl.primitive(1.0);
            const bool ok = integral > 1e-14;
            report.checks.push_back({"unbalance: int_0^1 f > 0", ok, ok ? 0.0 : std::abs(integral) + 1e-14});
            break;
        }
        case NonlinearityKind::combustion: {
            if (!theta_ok) {
                report.checks.push_back({"interior zero theta in (0,1)", false, 1.0});
                report.notes.push_back("no dead-zone threshold theta");
                break;
            }
            const double th = nl.theta();
            report.checks.push_back({"interior zero theta in (0,1)", true, 0.0});
            SignAccumulator flat;
            for (int i = 0; i < n; ++i) {
                const double u = sample(i);
                if (u > th) break;
                const double v = std::abs(nl(u));
                if (v > 1e-14) flat.violate(v);
            }
            report.checks.push_back(flat.as_check("f=0 on [0,theta]"));
            zero_check("f(1)=0", 1.0);
            sign_check("f>0 on (theta,1)", th, 1.0, +1);
            sign_check("f<0 on (1,u_max)", 1.0, u_max, -1);
            derivative_check("f'(1)<0", 1.0, -1);
            SignAccumulator mono;
            const double delta = nl.delta();
            if (!(delta > 0.0)) {
                mono.violate(1.0);
            } else {
                double last = nl(th);
                for (int i = 1; i <= n; ++i) {
                    const double u = th + delta * static_cast<double>(i) / (n + 1);
                    const double v = nl(u);
                    if (v < last - 1e-15) mono.violate(last - v);
                    last = v;
                }
            }
            report.checks.push_back(mono.as_check("nondecreasing on (theta,theta+delta)"));
            report.notes.push_back("contact at theta assumed C^1; Hoelder exponent alpha recorded, not verified");
            break;
        }
        case NonlinearityKind::monostable: {
            zero_check("f(1)=0", 1.0);
            sign_check("f>0 on (0,1)", 0.0, 1.0, +1);
            derivative_check("f'(0)>0", 0.0, +1);
            sign_check("f<0 on (1,u_max)", 1.0, u_max, -1);
            break;
        }
        case NonlinearityKind::custom:
            report.notes.push_back("no class conditions for untagged custom term");
            break;
    }
    return report;
}

double potential_F(const Nonlinearity& nl, double u) { return -2.0 * nl.primitive(u); }

double shifted_potential_G(const Nonlinearity& nl, double u) {
    if (nl.behaves_as() != NonlinearityKind::combustion) {
        throw std::domain_error("shifted_potential_G: combustion nonlinearity required");
    }
    const double th = nl.theta();
    return 2.0 * (nl.primitive(u + th) - nl.primitive(th));
}

double shifted_potential_gap(const Nonlinearity& nl, double b, double s) {
    if (nl.behaves_as() != NonlinearityKind::combustion) {
        throw std::domain_error("shifted_potential_gap: combustion nonlinearity required");
    }
    if (nl.is_builtin()) {
        const double th = nl.theta();
        return 2.0 * (b - s) * ((1.0 - th) * (b * b + b * s + s * s) / 3.0 - (b + s) * (b * b + s * s) / 4.0);
    }
    return shifted_potential_G(nl, b) - shifted_potential_G(nl, s);
}

double lambda0(const Nonlinearity& nl) {
    if (nl.behaves_as() != NonlinearityKind::bistable) {
        throw std::domain_error("lambda0: bistable nonlinearity required");
    }
    const double d = nl.f_prime(0.0);
    if (!(d < 0.0)) throw std::domain_error("lambda0: f'(0) must be negative");
    return 1.0 / std::sqrt(-d);
}

}  // namespace frontlab
