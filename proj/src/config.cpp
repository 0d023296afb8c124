#include "isodamp/config.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace isodamp {

using nlohmann::json;

namespace {

std::string join(const std::string& base, const std::string& key) { return base.empty() ? key : base + "." + key; }
std::string index(const std::string& base, size_t i) { return base + "[" + std::to_string(i) + "]"; }

void require_object(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) throw ConfigError(path, "expected object");
    const std::set<std::string> keys(allowed.begin(), allowed.end());
    for (const auto& [k, v] : j.items())
        if (!keys.count(k)) throw ConfigError(join(path, k), "unknown field");
}

const json* field(const json& j, const char* key) {
    const auto it = j.find(key);
    return it == j.end() ? nullptr : &*it;
}

const json& required(const json& j, const std::string& path, const char* key) {
    const json* f = field(j, key);
    if (!f) throw ConfigError(join(path, key), "missing field");
    return *f;
}

double number(const json& j, const std::string& path) {
    if (!j.is_number()) throw ConfigError(path, "expected number");
    const double x = j.get<double>();
    if (!std::isfinite(x)) throw ConfigError(path, "expected finite number");
    return x;
}

int integer(const json& j, const std::string& path) {
    if (!j.is_number_integer()) throw ConfigError(path, "expected integer");
    return j.get<int>();
}

bool boolean(const json& j, const std::string& path) {
    if (!j.is_boolean()) throw ConfigError(path, "expected boolean");
    return j.get<bool>();
}

std::string text(const json& j, const std::string& path) {
    if (!j.is_string()) throw ConfigError(path, "expected string");
    return j.get<std::string>();
}

std::vector<double> numbers(const json& j, const std::string& path) {
    if (!j.is_array()) throw ConfigError(path, "expected array");
    std::vector<double> out;
    for (size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], index(path, i)));
    return out;
}

Band band(const json& j, const std::string& path) {
    const auto v = numbers(j, path);
    if (v.size() != 2) throw ConfigError(path, "expected [lo, hi]");
    if (!(v[0] > 0.0 && v[0] < v[1])) throw ConfigError(path, "band must satisfy 0 < lo < hi");
    return {v[0], v[1]};
}

template <class T, class F>
void optional_field(const json& j, const std::string& path, const char* key, T& target, F&& read) {
    if (const json* f = field(j, key)) target = read(*f, join(path, key));
}

std::vector<double> coefficient_list(const json& j, const std::string& path) {
    auto v = numbers(j, path);
    if (v.empty()) throw ConfigError(path, "coefficient list must not be empty");
    return v;
}

PlantConfig plant_from_json(const json& j, const std::string& path) {
    require_object(j, path, {"num", "den", "delay"});
    PlantConfig p;
    p.num = coefficient_list(required(j, path, "num"), join(path, "num"));
    p.den = coefficient_list(required(j, path, "den"), join(path, "den"));
    optional_field(j, path, "delay", p.delay, number);
    if (Polynomial(p.den).is_zero()) throw ConfigError(join(path, "den"), "zero denominator");
    if (Polynomial(p.num).degree() > Polynomial(p.den).degree())
        throw ConfigError(join(path, "num"), "improper plant");
    if (p.delay < 0.0) throw ConfigError(join(path, "delay"), "delay must be >= 0");
    return p;
}

ControllerConfig controller_from_json(const json& j, const std::string& path) {
    require_object(j, path, {"kp", "ki", "kd"});
    ControllerConfig c;
    optional_field(j, path, "kp", c.kp, number);
    optional_field(j, path, "ki", c.ki, number);
    optional_field(j, path, "kd", c.kd, number);
    if (c.kp == 0.0 && c.ki == 0.0 && c.kd == 0.0) throw ConfigError(path, "empty controller");
    return c;
}

GainConvention convention_from_string(const std::string& s, const std::string& path) {
    if (s == "tableau") return GainConvention::tableau;
    if (s == "literal") return GainConvention::literal;
    throw ConfigError(path, "expected \"tableau\" or \"literal\"");
}

std::string to_string(GainConvention c) { return c == GainConvention::tableau ? "tableau" : "literal"; }

DesignMode mode_from_string(const std::string& s, const std::string& path) {
    if (s == "alpha_sweep") return DesignMode::alpha_sweep;
    if (s == "fit_flat_stage") return DesignMode::fit_flat_stage;
    throw ConfigError(path, "expected \"alpha_sweep\" or \"fit_flat_stage\"");
}

std::string to_string(DesignMode m) { return m == DesignMode::alpha_sweep ? "alpha_sweep" : "fit_flat_stage"; }

StageKind kind(const json& j, const std::string& path) {
    try {
        return stage_kind_from_string(text(j, path));
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError(path, e.what());
    }
}

CascadeConfig cascade_from_json(const json& j, const std::string& path) {
    require_object(j, path, {"enabled", "max_stages", "band", "target_deg"});
    CascadeConfig c;
    optional_field(j, path, "enabled", c.enabled, boolean);
    optional_field(j, path, "max_stages", c.max_stages, integer);
    if (const json* f = field(j, "band")) c.band = band(*f, join(path, "band"));
    optional_field(j, path, "target_deg", c.target_deg, number);
    if (c.max_stages < 0) throw ConfigError(join(path, "max_stages"), "must be >= 0");
    if (!(c.target_deg > 0.0)) throw ConfigError(join(path, "target_deg"), "must be > 0");
    return c;
}

DesignConfig design_from_json(const json& j, const std::string& path) {
    require_object(j, path,
                   {"alpha_grid", "k_bracket", "pade_order", "flatness_band", "band_points", "convention", "refine",
                    "mode", "form", "reference_q", "cascade"});
    DesignConfig d;
    d.alpha_grid = default_alpha_grid();
    optional_field(j, path, "alpha_grid", d.alpha_grid, numbers);
    if (const json* f = field(j, "k_bracket")) {
        const auto k = numbers(*f, join(path, "k_bracket"));
        if (k.size() != 2 || !(k[0] > 0.0 && k[0] < k[1]))
            throw ConfigError(join(path, "k_bracket"), "expected [k_lo, k_hi] with 0 < k_lo < k_hi");
        d.k_lo = k[0];
        d.k_hi = k[1];
    }
    optional_field(j, path, "pade_order", d.pade_order, integer);
    if (const json* f = field(j, "flatness_band")) d.flatness_band = band(*f, join(path, "flatness_band"));
    optional_field(j, path, "band_points", d.band_points, integer);
    if (const json* f = field(j, "convention"))
        d.convention = convention_from_string(text(*f, join(path, "convention")), join(path, "convention"));
    optional_field(j, path, "refine", d.refine, boolean);
    if (const json* f = field(j, "mode")) d.mode = mode_from_string(text(*f, join(path, "mode")), join(path, "mode"));
    if (const json* f = field(j, "form")) d.form = kind(*f, join(path, "form"));
    if (const json* f = field(j, "reference_q")) d.reference_q = number(*f, join(path, "reference_q"));
    if (const json* f = field(j, "cascade")) d.cascade = cascade_from_json(*f, join(path, "cascade"));

    if (d.alpha_grid.empty()) throw ConfigError(join(path, "alpha_grid"), "must not be empty");
    for (size_t i = 0; i < d.alpha_grid.size(); ++i) {
        if (!(d.alpha_grid[i] > 0.0)) throw ConfigError(index(join(path, "alpha_grid"), i), "alpha must be > 0");
        if (i > 0 && !(d.alpha_grid[i] > d.alpha_grid[i - 1]))
            throw ConfigError(index(join(path, "alpha_grid"), i), "alpha grid must be strictly increasing");
    }
    if (d.pade_order < 1 || d.pade_order > 5) throw ConfigError(join(path, "pade_order"), "must lie in 1..5");
    if (d.band_points < 16) throw ConfigError(join(path, "band_points"), "must be >= 16");
    return d;
}

SimConfig sim_from_json(const json& j, const std::string& path) {
    require_object(j, path, {"t_final", "dt", "gain_multipliers", "threshold_pct", "tail_fraction"});
    SimConfig s;
    optional_field(j, path, "t_final", s.t_final, number);
    if (const json* f = field(j, "dt")) s.dt = number(*f, join(path, "dt"));
    optional_field(j, path, "gain_multipliers", s.gain_multipliers, numbers);
    optional_field(j, path, "threshold_pct", s.threshold_pct, number);
    optional_field(j, path, "tail_fraction", s.tail_fraction, number);
    if (!(s.t_final > 0.0)) throw ConfigError(join(path, "t_final"), "must be > 0");
    if (s.dt && !(*s.dt > 0.0)) throw ConfigError(join(path, "dt"), "must be > 0");
    if (s.gain_multipliers.empty()) throw ConfigError(join(path, "gain_multipliers"), "must not be empty");
    for (size_t i = 0; i < s.gain_multipliers.size(); ++i)
        if (!(s.gain_multipliers[i] > 0.0))
            throw ConfigError(index(join(path, "gain_multipliers"), i), "multiplier must be > 0");
    if (s.threshold_pct < 0.0) throw ConfigError(join(path, "threshold_pct"), "must be >= 0");
    if (!(s.tail_fraction > 0.0 && s.tail_fraction < 1.0))
        throw ConfigError(join(path, "tail_fraction"), "must lie in (0, 1)");
    return s;
}

AnalysisConfig analysis_from_json(const json& j, const std::string& path) {
    require_object(j, path, {"w_lo", "w_hi", "points_per_decade", "flatness_band"});
    AnalysisConfig a;
    optional_field(j, path, "w_lo", a.w_lo, number);
    optional_field(j, path, "w_hi", a.w_hi, number);
    optional_field(j, path, "points_per_decade", a.points_per_decade, integer);
    if (const json* f = field(j, "flatness_band")) a.flatness_band = band(*f, join(path, "flatness_band"));
    if (!(a.w_lo > 0.0)) throw ConfigError(join(path, "w_lo"), "must be > 0");
    if (!(a.w_hi > a.w_lo)) throw ConfigError(join(path, "w_hi"), "must be > w_lo");
    if (a.points_per_decade < 1 || a.points_per_decade > 10000)
        throw ConfigError(join(path, "points_per_decade"), "must lie in 1..10000");
    return a;
}

json band_json(Band b) { return json::array({num(b.lo), num(b.hi)}); }

json numbers_json(const std::vector<double>& v) {
    json out = json::array();
    for (double x : v) out.push_back(num(x));
    return out;
}

} // namespace

std::vector<double> default_alpha_grid() {
    std::vector<double> g;
    for (int i = 1; i <= 19; ++i) g.push_back(i * 0.05);
    return g;
}

std::string format_number(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

json num(double x) {
    if (!std::isfinite(x)) return nullptr;
    const double r = std::strtod(format_number(x).c_str(), nullptr);
    return r == 0.0 ? 0.0 : r;
}

FoStage stage_from_json(const json& j, const std::string& path) {
    require_object(j, path, {"kind", "q", "alpha", "a", "gain_k"});
    const StageKind k = kind(required(j, path, "kind"), join(path, "kind"));
    double a = 0.0, gain = 1.0;
    optional_field(j, path, "a", a, number);
    optional_field(j, path, "gain_k", gain, number);
    const json* q = field(j, "q");
    const json* alpha = field(j, "alpha");
    if (q && alpha) throw ConfigError(path, "give either q or alpha, not both");
    if (!q && !alpha) throw ConfigError(join(path, "q"), "missing field");
    if (a < 0.0) throw ConfigError(join(path, "a"), "must be >= 0");
    if (k == StageKind::differintegrator && a != 0.0)
        throw ConfigError(join(path, "a"), "differintegrator takes no shift");
    if (!(gain > 0.0)) throw ConfigError(join(path, "gain_k"), "must be > 0");
    try {
        if (q) {
            const double qv = number(*q, join(path, "q"));
            if (!(std::abs(qv) < 1.0)) throw ConfigError(join(path, "q"), "order must satisfy |q| < 1");
            return FoStage::from_order(k, qv, a, gain);
        }
        const double av = number(*alpha, join(path, "alpha"));
        if (!(av > 0.0)) throw ConfigError(join(path, "alpha"), "must be > 0");
        return FoStage::from_alpha(k, av, a, gain);
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError(path, e.what());
    }
}

json to_json(const FoStage& s) {
    return json{{"kind", to_string(s.kind)}, {"q", num(s.q)}, {"a", num(s.a)}, {"gain_k", num(s.gain_k)}};
}

ProjectConfig config_from_json(const json& j) {
    require_object(j, "", {"plant", "controller", "stages", "design", "sim", "analysis", "outputs"});
    ProjectConfig c;
    c.plant = plant_from_json(required(j, "", "plant"), "plant");
    c.controller = controller_from_json(required(j, "", "controller"), "controller");
    if (const json* f = field(j, "stages")) {
        if (!f->is_array()) throw ConfigError("stages", "expected array");
        for (size_t i = 0; i < f->size(); ++i) c.stages.push_back(stage_from_json((*f)[i], index("stages", i)));
    }
    if (const json* f = field(j, "design")) c.design = design_from_json(*f, "design");
    if (const json* f = field(j, "sim")) c.sim = sim_from_json(*f, "sim");
    if (const json* f = field(j, "analysis")) c.analysis = analysis_from_json(*f, "analysis");
    if (const json* f = field(j, "outputs")) c.outputs = text(*f, "outputs");
    if (c.sim && c.plant.delay > 0.0 && c.sim->dt && *c.sim->dt > c.plant.delay / 10.0)
        throw ConfigError("sim.dt", "dt must be <= delay/10");
    return c;
}

ProjectConfig parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("", std::string("malformed JSON: ") + e.what());
    }
    return config_from_json(j);
}

ProjectConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

json to_json(const ProjectConfig& c) {
    json j;
    j["plant"] = {{"num", numbers_json(c.plant.num)}, {"den", numbers_json(c.plant.den)}, {"delay", num(c.plant.delay)}};
    j["controller"] = {{"kp", num(c.controller.kp)}, {"ki", num(c.controller.ki)}, {"kd", num(c.controller.kd)}};
    j["stages"] = json::array();
    for (const auto& s : c.stages) j["stages"].push_back(to_json(s));
    if (c.design) {
        const DesignConfig& d = *c.design;
        json cascade = {{"enabled", d.cascade.enabled},
                        {"max_stages", d.cascade.max_stages},
                        {"target_deg", num(d.cascade.target_deg)}};
        if (d.cascade.band) cascade["band"] = band_json(*d.cascade.band);
        j["design"] = {{"alpha_grid", numbers_json(d.alpha_grid)},
                       {"k_bracket", json::array({num(d.k_lo), num(d.k_hi)})},
                       {"pade_order", d.pade_order},
                       {"flatness_band", band_json(d.flatness_band)},
                       {"band_points", d.band_points},
                       {"convention", to_string(d.convention)},
                       {"refine", d.refine},
                       {"mode", to_string(d.mode)},
                       {"form", to_string(d.form)},
                       {"cascade", cascade}};
        if (d.reference_q) j["design"]["reference_q"] = num(*d.reference_q);
    }
    if (c.sim) {
        j["sim"] = {{"t_final", num(c.sim->t_final)},
                    {"gain_multipliers", numbers_json(c.sim->gain_multipliers)},
                    {"threshold_pct", num(c.sim->threshold_pct)},
                    {"tail_fraction", num(c.sim->tail_fraction)}};
        if (c.sim->dt) j["sim"]["dt"] = num(*c.sim->dt);
    }
    j["analysis"] = {{"w_lo", num(c.analysis.w_lo)},
                     {"w_hi", num(c.analysis.w_hi)},
                     {"points_per_decade", c.analysis.points_per_decade}};
    if (c.analysis.flatness_band) j["analysis"]["flatness_band"] = band_json(*c.analysis.flatness_band);
    j["outputs"] = c.outputs;
    return j;
}

std::string dump_config(const ProjectConfig& c) { return to_json(c).dump(2); }

std::string config_hash(const ProjectConfig& c) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : dump_config(c)) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

TransferFunction ProjectConfig::plant_tf() const {
    return {Polynomial(plant.num), Polynomial(plant.den), plant.delay};
}

TransferFunction ProjectConfig::controller_tf() const { return pid_tf(controller.kp, controller.ki, controller.kd); }

DesignSpec ProjectConfig::design_spec() const {
    if (!design) throw ConfigError("design", "missing field");
    DesignSpec s;
    s.plant = plant_tf();
    s.controller = controller_tf();
    s.alpha_grid = design->alpha_grid;
    s.k_lo = design->k_lo;
    s.k_hi = design->k_hi;
    s.pade_order = design->pade_order;
    s.flatness_band = design->flatness_band;
    s.band_points = design->band_points;
    s.convention = design->convention;
    s.refine = design->refine;
    return s;
}

} // namespace isodamp
