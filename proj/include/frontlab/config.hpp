#pragma once

#include "frontlab/classify.hpp"
#include "frontlab/fb_solver.hpp"
#include "frontlab/nonlinearity.hpp"

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace frontlab {

enum class ExperimentKind {
    simulate,
    classify,
    sigma_star,
    semiwave,
    xi0,
    groundstate,
    bump,
    fit_speed,
    zeronum,
    stefan_check,
    barrier_check
};

std::string to_string(ExperimentKind kind);
ExperimentKind experiment_kind_from_string(const std::string& name);

/// Raised for malformed or out-of-range configuration; the message starts with the field path.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Builtin (monostable, bistable, combustion) or tabulated reaction term.
struct NonlinearitySpec {
    std::string kind = "bistable";
    std::map<std::string, double> params;
    std::string behaves_as;  ///< tabulated only
    std::vector<std::pair<double, double>> table;
    std::optional<double> theta;
    double u_max = 2.0;

    bool operator==(const NonlinearitySpec&) const = default;
};

Nonlinearity build_nonlinearity(const NonlinearitySpec& spec);

/// Unit-amplitude initial shapes on [-h0, h0]:
///   cos            cos(pi x / (2 h0))
///   parabola       1 - (x / h0)^2
///   plateau        min(1, (h0 - |x|) / width)                      params {width}
///   skewed_cos     cos(pi x / (2 h0)) (1 + skew x / h0)            params {skew}
///   two_bump       cos(pi x / (2 h0)) (dip + (1 - dip) sin^2(pi x / h0)) (1 + skew x / h0)
///                                                                   params {dip, skew}
///   tabulated      piecewise linear through (x, u) pairs
struct ShapeSpec {
    std::string name = "cos";
    std::map<std::string, double> params;
    std::vector<std::pair<double, double>> table;

    bool operator==(const ShapeSpec&) const = default;
};

std::function<double(double)> build_shape(const ShapeSpec& spec, double h0);

struct ToleranceSpec {
    double sigma = 1e-12;       ///< relative bracket width for sigma-star
    double semiwave = 1e-12;    ///< absolute bracket width in c
    double zero_rel = 1e-7;     ///< zero-number dead-band relative to max |w|
    double slope = 1e-5;        ///< degenerate-zero slope threshold
    double rel_gap = 0.01;      ///< divergence window gap

    bool operator==(const ToleranceSpec&) const = default;
};

/// Parameters consumed by individual experiment kinds; unused fields are ignored by the others.
struct ExperimentSpec {
    double sigma = 1.0;                 ///< amplitude for simulate, classify, fit-speed, zeronum
    double t_cap = 5000.0;              ///< classify and sigma-star probe cap
    double sigma_start = 1.0;
    int check_every = 10;
    Margins margins;
    std::string law = "linear";         ///< fit-speed law
    double t_a = 0.0;                   ///< fit-speed window; t_b <= t_a selects the last half
    double t_b = 0.0;
    std::vector<double> b_values = {1e-3, 1e-2, 0.05};
    std::optional<double> theta;        ///< xi0 and stefan-check level (defaults to the nonlinearity's)
    double t0 = 1.0;                    ///< stefan-check start time
    double m_factor = 2.0;              ///< barrier m = m_factor lambda0^2 / mu
    double m1_factor = 0.25;            ///< barrier m1 = m1_factor lambda0^2 / mu
    double x0 = 0.0;
    double barrier_t_min = 10.0;        ///< geometric barrier time grid
    double barrier_t_max = 1e6;
    int barrier_t_points = 400;
    int barrier_x_points = 200;
    std::string zeronum_source = "reflection";  ///< reflection | bracket
    int zeronum_samples = 200;          ///< uniform sample times on [0, solver.t_end]

    bool operator==(const ExperimentSpec&) const = default;
};

struct RunConfig {
    ExperimentKind kind = ExperimentKind::simulate;
    NonlinearitySpec nonlinearity;
    ShapeSpec initial;
    double h0 = 1.0;
    double mu = 1.0;
    SolverConfig solver;
    std::string output = "out";
    ToleranceSpec tolerances;
    ExperimentSpec experiment;
    std::optional<int> workers;

    bool operator==(const RunConfig&) const = default;
};

RunConfig parse_config_text(const std::string& text);
RunConfig parse_config(const std::filesystem::path& path);
/// Fully resolved configuration, pretty-printed JSON.
std::string serialize(const RunConfig& config);

}  // namespace frontlab
