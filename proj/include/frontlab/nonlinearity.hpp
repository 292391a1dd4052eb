#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace frontlab {

enum class NonlinearityKind { monostable, bistable, combustion, custom };

std::string to_string(NonlinearityKind kind);
NonlinearityKind nonlinearity_kind_from_string(const std::string& name);

/// One named class condition with its sampled verdict.
struct ClassCheck {
    std::string name;
    bool passed = true;
    double worst_violation = 0.0;
};

struct ValidationReport {
    NonlinearityKind checked_as = NonlinearityKind::custom;
    std::vector<ClassCheck> checks;
    std::vector<std::string> notes;

    bool passed() const;
    const ClassCheck* find(const std::string& name) const;
    std::string summary() const;
};

/// Reaction term f together with its class tag and derived potentials.
///
/// Immutable after construction. Builtins carry exact antiderivatives; tabulated
/// terms use monotone-cubic interpolation and integrate the interpolant exactly.
class Nonlinearity {
public:
    using ScalarMap = std::function<double(double)>;

    /// Canonical instances:
    ///   bistable    u(1-u)(u-a),                   params {a, u_max}
    ///   combustion  (u-theta)^2 (1-u) for u > theta, params {theta, u_max}
    ///   monostable  u(1-u),                        params {u_max}
    static Nonlinearity make_builtin(NonlinearityKind kind,
                                     const std::map<std::string, double>& params = {});

    /// Tabulated (u, f(u)) pairs; `behaves_as` selects which class conditions apply.
    static Nonlinearity make_tabulated(NonlinearityKind behaves_as,
                                       std::vector<std::pair<double, double>> table,
                                       std::optional<double> theta = std::nullopt,
                                       double u_max = 2.0);

    /// Arbitrary closure, validated like a builtin of class `behaves_as`.
    static Nonlinearity make_custom(NonlinearityKind behaves_as, ScalarMap f,
                                    std::optional<ScalarMap> f_prime = std::nullopt,
                                    std::optional<double> theta = std::nullopt, double u_max = 2.0,
                                    bool validate = true);

    double operator()(double u) const { return f_(u); }
    double f(double u) const { return f_(u); }
    double f_prime(double u) const;

    /// \int_0^u f(s) ds.
    double primitive(double u) const;

    NonlinearityKind kind() const { return kind_; }
    /// Class whose conditions apply (equals kind() except for custom terms).
    NonlinearityKind behaves_as() const { return behaves_as_; }
    bool has_theta() const { return theta_.has_value(); }
    double theta() const;
    double u_max() const { return u_max_; }
    double delta() const { return delta_; }
    /// Hölder exponent of f' near 0; recorded metadata, never verified.
    double alpha() const { return alpha_; }
    /// max |f'| over [0, 1], used for step-size and classification scales.
    double derivative_scale() const { return derivative_scale_; }

    const std::map<std::string, double>& params() const { return params_; }
    const std::vector<std::pair<double, double>>& table() const { return table_; }
    bool is_builtin() const { return builtin_; }

private:
    Nonlinearity() = default;
    void finish();

    NonlinearityKind kind_ = NonlinearityKind::custom;
    NonlinearityKind behaves_as_ = NonlinearityKind::custom;
    std::optional<double> theta_;
    double u_max_ = 2.0;
    double delta_ = 0.0;
    double alpha_ = 1.0;
    double derivative_scale_ = 1.0;
    bool builtin_ = false;
    ScalarMap f_;
    std::optional<ScalarMap> f_prime_;
    std::optional<ScalarMap> primitive_;
    std::map<std::string, double> params_;
    std::vector<std::pair<double, double>> table_;
};

ValidationReport validate_class(const Nonlinearity& nl, int grid_points = 2000);
ValidationReport validate_class(const Nonlinearity& nl, NonlinearityKind as_kind, int grid_points = 2000);

/// F(u) = -2 \int_0^u f.
double potential_F(const Nonlinearity& nl, double u);

/// G(u) = 2 \int_0^u f(s + theta) ds; combustion only.
double shifted_potential_G(const Nonlinearity& nl, double u);

/// G(b) - G(s), evaluated without cancellation for builtins.
double shifted_potential_gap(const Nonlinearity& nl, double b, double s);

/// [-f'(0)]^{-1/2}; bistable only.
double lambda0(const Nonlinearity& nl);

}  // namespace frontlab
