#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "isodamp/carlson.hpp"
#include "isodamp/error.hpp"
#include "isodamp/lti.hpp"
#include "isodamp/shaper.hpp"

namespace isodamp {

struct PlantConfig {
    std::vector<double> num;
    std::vector<double> den;
    double delay = 0.0;
};

struct ControllerConfig {
    double kp = 0.0;
    double ki = 0.0;
    double kd = 0.0;
};

enum class DesignMode { alpha_sweep, fit_flat_stage };

struct CascadeConfig {
    bool enabled = false;
    int max_stages = 2;
    std::optional<Band> band;  // default: one decade centered at w_gc
    double target_deg = 5.0;
};

struct DesignConfig {
    std::vector<double> alpha_grid;  // default 0.05:0.05:0.95
    double k_lo = 0.1;
    double k_hi = 1e4;
    int pade_order = 3;
    Band flatness_band{0.5, 20.0};
    int band_points = 200;
    GainConvention convention = GainConvention::tableau;
    bool refine = false;
    DesignMode mode = DesignMode::alpha_sweep;
    StageKind form = StageKind::shifted_sum;
    std::optional<double> reference_q;
    CascadeConfig cascade;
};

struct SimConfig {
    double t_final = 20.0;
    std::optional<double> dt;
    std::vector<double> gain_multipliers{0.8, 0.9, 1.0, 1.1, 1.2};
    double threshold_pct = 2.0;
    double tail_fraction = 0.2;
};

struct AnalysisConfig {
    double w_lo = 1e-2;
    double w_hi = 1e2;
    int points_per_decade = 200;
    std::optional<Band> flatness_band;  // default: one decade centered at w_gc
};

struct ProjectConfig {
    PlantConfig plant;
    ControllerConfig controller;
    std::vector<FoStage> stages;
    std::optional<DesignConfig> design;
    std::optional<SimConfig> sim;
    AnalysisConfig analysis;
    std::string outputs = "out";

    TransferFunction plant_tf() const;
    TransferFunction controller_tf() const;
    DesignSpec design_spec() const;
};

// Strict parse: unknown fields, wrong types and invariant violations raise
// ConfigError with the offending field path.
ProjectConfig config_from_json(const nlohmann::json& j);
ProjectConfig load_config(const std::string& path);
ProjectConfig parse_config(const std::string& text);

nlohmann::json to_json(const ProjectConfig& c);
nlohmann::json to_json(const FoStage& s);
FoStage stage_from_json(const nlohmann::json& j, const std::string& path = "stage");

// Canonical text (2-space indent, 12 significant digits) and its FNV-1a hash.
std::string dump_config(const ProjectConfig& c);
std::string config_hash(const ProjectConfig& c);

// x rounded to 12 significant digits; null for non-finite values.
nlohmann::json num(double x);
std::string format_number(double x);

std::vector<double> default_alpha_grid();

} // namespace isodamp
