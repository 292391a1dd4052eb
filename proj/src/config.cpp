#include "frontlab/config.hpp"

#include "frontlab/numerics.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

namespace frontlab {

using nlohmann::json;

namespace {

constexpr std::pair<ExperimentKind, const char*> kKindNames[] = {
    {ExperimentKind::simulate, "simulate"},         {ExperimentKind::classify, "classify"},
    {ExperimentKind::sigma_star, "sigma-star"},     {ExperimentKind::semiwave, "semiwave"},
    {ExperimentKind::xi0, "xi0"},                   {ExperimentKind::groundstate, "groundstate"},
    {ExperimentKind::bump, "bump"},                 {ExperimentKind::fit_speed, "fit-speed"},
    {ExperimentKind::zeronum, "zeronum"},           {ExperimentKind::stefan_check, "stefan-check"},
    {ExperimentKind::barrier_check, "barrier-check"},
};

/// Strict reader over one JSON object: every key must be consumed before finish().
class Section {
public:
    Section(const json& node, std::string path) : node_(node), path_(std::move(path)) {
        if (!node_.is_object()) fail("", "expected an object");
    }

    bool has(const std::string& key) const { return node_.contains(key); }

    template <typename T>
    void read(const std::string& key, T& out) {
        if (!node_.contains(key)) return;
        seen_.insert(key);
        try {
            out = node_.at(key).get<T>();
        } catch (const json::exception&) {
            fail(key, "wrong type");
        }
    }

    template <typename T>
    void read(const std::string& key, std::optional<T>& out) {
        if (!node_.contains(key)) return;
        if (node_.at(key).is_null()) {
            seen_.insert(key);
            out.reset();
            return;
        }
        T value{};
        read(key, value);
        out = value;
    }

    Section child(const std::string& key) {
        seen_.insert(key);
        return Section(node_.at(key), field(key));
    }

    const json& raw(const std::string& key) {
        seen_.insert(key);
        return node_.at(key);
    }

    void finish() const {
        for (const auto& item : node_.items()) {
            if (!seen_.count(item.key())) fail(item.key(), "unknown key");
        }
    }

    [[noreturn]] void fail(const std::string& key, const std::string& why) const {
        throw ConfigError(field(key) + ": " + why);
    }

    std::string field(const std::string& key) const {
        if (key.empty()) return path_.empty() ? "<root>" : path_;
        return path_.empty() ? key : path_ + "." + key;
    }

private:
    const json& node_;
    std::string path_;
    std::set<std::string> seen_;
};

std::map<std::string, double> read_params(Section& s, const std::string& key) {
    std::map<std::string, double> out;
    if (!s.has(key)) return out;
    const json& node = s.raw(key);
    if (!node.is_object()) s.fail(key, "expected an object");
    for (const auto& item : node.items()) {
        if (!item.value().is_number()) s.fail(key + "." + item.key(), "expected a number");
        out[item.key()] = item.value().get<double>();
    }
    return out;
}

std::vector<std::pair<double, double>> read_table(Section& s, const std::string& key) {
    std::vector<std::pair<double, double>> out;
    if (!s.has(key)) return out;
    const json& node = s.raw(key);
    if (!node.is_array()) s.fail(key, "expected an array of [x, y] pairs");
    for (std::size_t i = 0; i < node.size(); ++i) {
        const json& row = node[i];
        if (!row.is_array() || row.size() != 2 || !row[0].is_number() || !row[1].is_number()) {
            s.fail(key + "[" + std::to_string(i) + "]", "expected [x, y]");
        }
        out.emplace_back(row[0].get<double>(), row[1].get<double>());
    }
    return out;
}

template <typename Enum, typename Parse>
void read_enum(Section& s, const std::string& key, Enum& out, Parse parse) {
    if (!s.has(key)) return;
    std::string name;
    s.read(key, name);
    try {
        out = parse(name);
    } catch (const std::invalid_argument& e) {
        s.fail(key, e.what());
    }
}

void require(bool ok, const std::string& field, const std::string& why) {
    if (!ok) throw ConfigError(field + ": " + why);
}

void parse_nonlinearity(Section s, NonlinearitySpec& nl) {
    s.read("kind", nl.kind);
    nl.params = read_params(s, "params");
    s.read("behaves_as", nl.behaves_as);
    nl.table = read_table(s, "table");
    s.read("theta", nl.theta);
    s.read("u_max", nl.u_max);
    s.finish();
    static const std::set<std::string> kinds = {"monostable", "bistable", "combustion", "tabulated"};
    require(kinds.count(nl.kind) == 1, s.field("kind"), "unknown nonlinearity kind '" + nl.kind + "'");
    require(nl.u_max > 1.0, s.field("u_max"), "must exceed 1");
    if (nl.kind == "tabulated") {
        require(!nl.behaves_as.empty(), s.field("behaves_as"), "required for tabulated terms");
        require(!nl.table.empty(), s.field("table"), "required for tabulated terms");
    } else {
        require(nl.table.empty(), s.field("table"), "only valid for tabulated terms");
        require(nl.behaves_as.empty(), s.field("behaves_as"), "only valid for tabulated terms");
        require(!nl.theta, s.field("theta"), "builtin terms take theta in params");
    }
}

void parse_shape(Section s, ShapeSpec& shape) {
    s.read("name", shape.name);
    shape.params = read_params(s, "params");
    shape.table = read_table(s, "table");
    s.finish();
    static const std::map<std::string, std::set<std::string>> allowed = {
        {"cos", {}},        {"parabola", {}},           {"plateau", {"width"}},
        {"skewed_cos", {"skew"}}, {"two_bump", {"dip", "skew"}}, {"tabulated", {}},
    };
    const auto it = allowed.find(shape.name);
    require(it != allowed.end(), s.field("name"), "unknown shape '" + shape.name + "'");
    for (const auto& [key, value] : shape.params) {
        require(it->second.count(key) == 1, s.field("params." + key), "unknown shape parameter");
    }
    require((shape.name == "tabulated") == !shape.table.empty(), s.field("table"),
            "required for, and only valid for, the tabulated shape");
}

void parse_solver(Section s, SolverConfig& c) {
    s.read("nodes", c.nodes);
    if (s.has("dt_rule")) {
        Section r = s.child("dt_rule");
        std::string kind = c.dt_rule.kind == TimeStepRule::Kind::fixed ? "fixed" : "cfl";
        r.read("kind", kind);
        r.read("value", c.dt_rule.value);
        r.finish();
        require(kind == "fixed" || kind == "cfl", r.field("kind"), "expected fixed or cfl");
        c.dt_rule.kind = kind == "fixed" ? TimeStepRule::Kind::fixed : TimeStepRule::Kind::cfl;
    }
    s.read("t_end", c.t_end);
    s.read("snapshot_stride", c.snapshot_stride);
    read_enum(s, "stencil", c.stencil, boundary_stencil_from_string);
    read_enum(s, "mode", c.mode, front_mode_from_string);
    read_enum(s, "scheme", c.scheme, time_scheme_from_string);
    s.read("pinned_value", c.pinned_value);
    s.read("max_retries", c.max_retries);
    s.finish();
}

void parse_tolerances(Section s, ToleranceSpec& t) {
    s.read("sigma", t.sigma);
    s.read("semiwave", t.semiwave);
    s.read("zero_rel", t.zero_rel);
    s.read("slope", t.slope);
    s.read("rel_gap", t.rel_gap);
    s.finish();
    require(t.sigma > 0.0, s.field("sigma"), "must be positive");
    require(t.semiwave > 0.0, s.field("semiwave"), "must be positive");
    require(t.zero_rel >= 0.0, s.field("zero_rel"), "must be nonnegative");
    require(t.slope >= 0.0, s.field("slope"), "must be nonnegative");
    require(t.rel_gap > 0.0, s.field("rel_gap"), "must be positive");
}

void parse_experiment(Section s, ExperimentSpec& e) {
    s.read("sigma", e.sigma);
    s.read("t_cap", e.t_cap);
    s.read("sigma_start", e.sigma_start);
    s.read("check_every", e.check_every);
    s.read("margin_up", e.margins.up);
    s.read("margin_down", e.margins.down);
    s.read("law", e.law);
    s.read("t_a", e.t_a);
    s.read("t_b", e.t_b);
    s.read("b_values", e.b_values);
    s.read("theta", e.theta);
    s.read("t0", e.t0);
    s.read("m_factor", e.m_factor);
    s.read("m1_factor", e.m1_factor);
    s.read("x0", e.x0);
    s.read("barrier_t_min", e.barrier_t_min);
    s.read("barrier_t_max", e.barrier_t_max);
    s.read("barrier_t_points", e.barrier_t_points);
    s.read("barrier_x_points", e.barrier_x_points);
    s.read("zeronum_source", e.zeronum_source);
    s.read("zeronum_samples", e.zeronum_samples);
    s.finish();
    require(e.sigma > 0.0, s.field("sigma"), "must be positive");
    require(e.t_cap > 0.0, s.field("t_cap"), "must be positive");
    require(e.sigma_start > 0.0, s.field("sigma_start"), "must be positive");
    require(e.check_every >= 1, s.field("check_every"), "must be at least 1");
    require(e.margins.up > 0.0, s.field("margin_up"), "must be positive");
    require(e.margins.down > 0.0, s.field("margin_down"), "must be positive");
    try {
        speed_law_from_string(e.law);
    } catch (const std::invalid_argument&) {
        s.fail("law", "expected linear, log or sqrt");
    }
    for (double b : e.b_values) require(b > 0.0, s.field("b_values"), "entries must be positive");
    require(e.t0 > 0.0, s.field("t0"), "must be positive");
    require(e.m_factor > 0.0, s.field("m_factor"), "must be positive");
    require(e.m1_factor > 0.0, s.field("m1_factor"), "must be positive");
    require(e.barrier_t_min > 0.0, s.field("barrier_t_min"), "must be positive");
    require(e.barrier_t_max > e.barrier_t_min, s.field("barrier_t_max"), "must exceed barrier_t_min");
    require(e.barrier_t_points >= 2, s.field("barrier_t_points"), "must be at least 2");
    require(e.barrier_x_points >= 2, s.field("barrier_x_points"), "must be at least 2");
    require(e.zeronum_source == "reflection" || e.zeronum_source == "bracket", s.field("zeronum_source"),
            "expected reflection or bracket");
    require(e.zeronum_samples >= 2, s.field("zeronum_samples"), "must be at least 2");
}

json params_json(const std::map<std::string, double>& params) {
    json out = json::object();
    for (const auto& [k, v] : params) out[k] = v;
    return out;
}

json table_json(const std::vector<std::pair<double, double>>& table) {
    json out = json::array();
    for (const auto& [x, y] : table) out.push_back({x, y});
    return out;
}

}  // namespace

std::string to_string(ExperimentKind kind) {
    for (const auto& [k, name] : kKindNames) {
        if (k == kind) return name;
    }
    return "simulate";
}

ExperimentKind experiment_kind_from_string(const std::string& name) {
    for (const auto& [k, n] : kKindNames) {
        if (name == n) return k;
    }
    throw std::invalid_argument("unknown experiment kind '" + name + "'");
}

Nonlinearity build_nonlinearity(const NonlinearitySpec& spec) {
    if (spec.kind == "tabulated") {
        return Nonlinearity::make_tabulated(nonlinearity_kind_from_string(spec.behaves_as), spec.table, spec.theta,
                                            spec.u_max);
    }
    auto params = spec.params;
    params["u_max"] = spec.u_max;
    return Nonlinearity::make_builtin(nonlinearity_kind_from_string(spec.kind), params);
}

std::function<double(double)> build_shape(const ShapeSpec& spec, double h0) {
    auto param = [&](const std::string& key, double fallback) {
        const auto it = spec.params.find(key);
        return it == spec.params.end() ? fallback : it->second;
    };
    const double k = std::numbers::pi / (2.0 * h0);
    auto inside = [h0](double x) { return std::abs(x) < h0; };
    if (spec.name == "cos") {
        return [=](double x) { return inside(x) ? std::cos(k * x) : 0.0; };
    }
    if (spec.name == "parabola") {
        return [=](double x) { return inside(x) ? 1.0 - (x / h0) * (x / h0) : 0.0; };
    }
    if (spec.name == "plateau") {
        const double width = param("width", 0.25 * h0);
        if (!(width > 0.0 && width <= h0)) throw std::invalid_argument("plateau: width must lie in (0, h0]");
        return [=](double x) { return inside(x) ? std::min(1.0, (h0 - std::abs(x)) / width) : 0.0; };
    }
    if (spec.name == "skewed_cos" || spec.name == "two_bump") {
        const double skew = param("skew", spec.name == "skewed_cos" ? 0.5 : 0.0);
        const double dip = spec.name == "two_bump" ? param("dip", 0.2) : 1.0;
        if (!(std::abs(skew) < 1.0)) throw std::invalid_argument(spec.name + ": |skew| must be below 1");
        if (!(dip > 0.0 && dip <= 1.0)) throw std::invalid_argument(spec.name + ": dip must lie in (0, 1]");
        return [=](double x) {
            if (!inside(x)) return 0.0;
            const double s = std::sin(2.0 * k * x);
            return std::cos(k * x) * (dip + (1.0 - dip) * s * s) * (1.0 + skew * x / h0);
        };
    }
    if (spec.name == "tabulated") {
        std::vector<double> xs, us;
        for (const auto& [x, u] : spec.table) {
            if (!xs.empty() && !(x > xs.back())) throw std::invalid_argument("tabulated shape: x must increase");
            xs.push_back(x);
            us.push_back(u);
        }
        return [xs, us](double x) {
            if (x <= xs.front() || x >= xs.back()) return 0.0;
            return interp_linear(xs, us, x);
        };
    }
    throw std::invalid_argument("unknown shape '" + spec.name + "'");
}

RunConfig parse_config_text(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("<root>: ") + e.what());
    }
    RunConfig c;
    Section s(root, "");
    if (s.has("kind")) {
        std::string name;
        s.read("kind", name);
        try {
            c.kind = experiment_kind_from_string(name);
        } catch (const std::invalid_argument& e) {
            s.fail("kind", e.what());
        }
    }
    if (s.has("nonlinearity")) parse_nonlinearity(s.child("nonlinearity"), c.nonlinearity);
    if (s.has("initial")) parse_shape(s.child("initial"), c.initial);
    s.read("h0", c.h0);
    s.read("mu", c.mu);
    if (s.has("solver")) parse_solver(s.child("solver"), c.solver);
    s.read("output", c.output);
    if (s.has("tolerances")) parse_tolerances(s.child("tolerances"), c.tolerances);
    if (s.has("experiment")) parse_experiment(s.child("experiment"), c.experiment);
    s.read("workers", c.workers);
    s.finish();

    require(std::isfinite(c.h0) && c.h0 > 0.0, "h0", "must be positive");
    require(std::isfinite(c.mu) && c.mu > 0.0, "mu", "must be positive");
    require(!c.output.empty(), "output", "must not be empty");
    require(!c.workers || *c.workers >= 1, "workers", "must be at least 1");
    c.solver.mu = c.mu;
    try {
        c.solver.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return c;
}

RunConfig parse_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("<root>: cannot open " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config_text(text.str());
}

std::string serialize(const RunConfig& c) {
    json root;
    root["kind"] = to_string(c.kind);

    json& nl = root["nonlinearity"];
    nl["kind"] = c.nonlinearity.kind;
    nl["params"] = params_json(c.nonlinearity.params);
    nl["u_max"] = c.nonlinearity.u_max;
    if (c.nonlinearity.kind == "tabulated") {
        nl["behaves_as"] = c.nonlinearity.behaves_as;
        nl["table"] = table_json(c.nonlinearity.table);
        nl["theta"] = c.nonlinearity.theta ? json(*c.nonlinearity.theta) : json(nullptr);
    }

    json& shape = root["initial"];
    shape["name"] = c.initial.name;
    shape["params"] = params_json(c.initial.params);
    if (!c.initial.table.empty()) shape["table"] = table_json(c.initial.table);

    root["h0"] = c.h0;
    root["mu"] = c.mu;

    json& s = root["solver"];
    s["nodes"] = c.solver.nodes;
    s["dt_rule"] = {{"kind", c.solver.dt_rule.kind == TimeStepRule::Kind::fixed ? "fixed" : "cfl"},
                    {"value", c.solver.dt_rule.value}};
    s["t_end"] = c.solver.t_end;
    s["snapshot_stride"] = c.solver.snapshot_stride;
    s["stencil"] = to_string(c.solver.stencil);
    s["mode"] = to_string(c.solver.mode);
    s["scheme"] = to_string(c.solver.scheme);
    s["pinned_value"] = c.solver.pinned_value;
    s["max_retries"] = c.solver.max_retries;

    root["output"] = c.output;
    root["tolerances"] = {{"sigma", c.tolerances.sigma},     {"semiwave", c.tolerances.semiwave},
                          {"zero_rel", c.tolerances.zero_rel}, {"slope", c.tolerances.slope},
                          {"rel_gap", c.tolerances.rel_gap}};

    const auto& e = c.experiment;
    root["experiment"] = {
        {"sigma", e.sigma},
        {"t_cap", e.t_cap},
        {"sigma_start", e.sigma_start},
        {"check_every", e.check_every},
        {"margin_up", e.margins.up},
        {"margin_down", e.margins.down},
        {"law", e.law},
        {"t_a", e.t_a},
        {"t_b", e.t_b},
        {"b_values", e.b_values},
        {"theta", e.theta ? json(*e.theta) : json(nullptr)},
        {"t0", e.t0},
        {"m_factor", e.m_factor},
        {"m1_factor", e.m1_factor},
        {"x0", e.x0},
        {"barrier_t_min", e.barrier_t_min},
        {"barrier_t_max", e.barrier_t_max},
        {"barrier_t_points", e.barrier_t_points},
        {"barrier_x_points", e.barrier_x_points},
        {"zeronum_source", e.zeronum_source},
        {"zeronum_samples", e.zeronum_samples},
    };
    root["workers"] = c.workers ? json(*c.workers) : json(nullptr);
    return root.dump(2) + "\n";
}

}  // namespace frontlab
