#include "isodamp/pipeline.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "isodamp/sim.hpp"

namespace isodamp {

using nlohmann::json;

namespace {

constexpr double kDeg = 180.0 / std::numbers::pi;
constexpr int kFlatnessPoints = 200;

std::string cell(const json& v) { return v.is_null() ? std::string() : format_number(v.get<double>()); }

json opt(const std::optional<double>& v) { return v ? num(*v) : json(nullptr); }

std::string to_string(MarginalGainResult::Kind k) {
    switch (k) {
    case MarginalGainResult::Kind::finite: return "finite";
    case MarginalGainResult::Kind::unbounded: return "unbounded";
    case MarginalGainResult::Kind::zero: return "zero";
    }
    return "finite";
}

std::string multiplier_label(double m) { return format_number(m); }

std::vector<double> analysis_grid(const AnalysisConfig& a) {
    const double decades = std::log10(a.w_hi / a.w_lo);
    const int n = std::max(2, static_cast<int>(std::ceil(decades * a.points_per_decade)) + 1);
    return log_grid(a.w_lo, a.w_hi, n);
}

json margins_json(const MarginReport& m, const std::string& curve) {
    json gm_db = nullptr;
    if (m.gain_margin && *m.gain_margin > 0.0) gm_db = num(20.0 * std::log10(*m.gain_margin));
    return {{"curve", curve},
            {"gain_crossover_wgc", opt(m.gain_crossover_wgc)},
            {"phase_crossover_wpc", opt(m.phase_crossover_wpc)},
            {"gain_margin", opt(m.gain_margin)},
            {"gain_margin_db", gm_db},
            {"phase_margin_deg", opt(m.phase_margin)}};
}

std::string pretty(const json& j) { return j.dump(2) + "\n"; }

json stages_json(const std::vector<FoStage>& stages) {
    json out = json::array();
    for (const auto& s : stages) out.push_back(to_json(s));
    return out;
}

MarginReport loop_margins(const TransferFunction& loop, const AnalysisConfig& a) {
    const double decades = std::log10(a.w_hi / a.w_lo);
    const int n = std::max(2, static_cast<int>(std::ceil(decades * a.points_per_decade)) + 1);
    return margins(loop, a.w_lo, a.w_hi, n);
}

json band_json(Band b) { return json::array({num(b.lo), num(b.hi)}); }

} // namespace

TransferFunction stage_chain(const std::vector<FoStage>& stages) {
    TransferFunction out;
    for (const auto& s : stages) out = series(out, realize_first_order(s));
    return out;
}

Band decade_around(double w) { return {w / std::sqrt(10.0), w * std::sqrt(10.0)}; }

PipelineResult run_analyze(const ProjectConfig& config) {
    const TransferFunction plant = config.plant_tf();
    const TransferFunction controller = config.controller_tf();
    std::vector<std::pair<std::string, TransferFunction>> curves{{"plant", plant},
                                                                 {"plant+controller", series(controller, plant)}};
    if (!config.stages.empty())
        curves.emplace_back("plant+controller+stages", series(stage_chain(config.stages), series(controller, plant)));

    const std::vector<double> w = analysis_grid(config.analysis);
    PipelineResult r;
    json bode = json::array();
    std::string csv = "curve,omega_rad_s,mag_db,phase_deg\n";
    for (const auto& [label, g] : curves) {
        const std::vector<double> phase = unwrapped_phase(g, w);
        json omega = json::array(), mag = json::array(), ph = json::array();
        for (size_t i = 0; i < w.size(); ++i) {
            const double m = std::abs(freq_response(g, w[i]));
            omega.push_back(num(w[i]));
            mag.push_back(m > 0.0 ? num(20.0 * std::log10(m)) : json(nullptr));
            ph.push_back(num(phase[i] * kDeg));
            csv += label + "," + cell(omega.back()) + "," + cell(mag.back()) + "," + cell(ph.back()) + "\n";
        }
        bode.push_back({{"curve", label}, {"omega_rad_s", omega}, {"mag_db", mag}, {"phase_deg", ph}});
    }

    const auto& [loop_label, loop] = curves.back();
    const MarginReport m = loop_margins(loop, config.analysis);
    const json margins = margins_json(m, loop_label);

    Band band{0.5, 20.0};
    std::string band_source = "default";
    if (config.analysis.flatness_band) {
        band = *config.analysis.flatness_band;
        band_source = "analysis.flatness_band";
    } else if (m.gain_crossover_wgc) {
        band = decade_around(*m.gain_crossover_wgc);
        band_source = "decade around gain crossover";
    } else if (config.design) {
        band = config.design->flatness_band;
        band_source = "design.flatness_band";
    }
    json per_curve = json::object();
    for (const auto& [label, g] : curves) per_curve[label] = num(phase_flatness(g, band, kFlatnessPoints));
    const json flatness = {{"curve", loop_label},
                           {"band", band_json(band)},
                           {"band_source", band_source},
                           {"band_points", kFlatnessPoints},
                           {"spread_deg", per_curve[loop_label]},
                           {"spread_deg_by_curve", per_curve}};

    r.payload = {{"bode", bode}, {"margins", margins}, {"flatness", flatness}};
    r.files = {{"bode.csv", csv}, {"margins.json", pretty(margins)}, {"flatness.json", pretty(flatness)}};
    return r;
}

PipelineResult run_design(const ProjectConfig& config) {
    if (!config.design) throw ConfigError("design", "missing field");
    const DesignConfig& d = *config.design;
    const TransferFunction plant = config.plant_tf();
    const TransferFunction controller = config.controller_tf();
    const TransferFunction base_loop = series(controller, plant);

    json design;
    std::vector<FoStage> stages;
    json notes = json::array();

    if (d.mode == DesignMode::alpha_sweep) {
        const DesignReport rep = design_alpha(config.design_spec());
        json rows = json::array();
        for (const auto& row : rep.per_alpha) {
            rows.push_back({{"alpha", num(row.alpha)},
                            {"kind", to_string(row.kind)},
                            {"k_m", row.kind == MarginalGainResult::Kind::finite ? num(row.k_m) : json(nullptr)},
                            {"constraints_satisfied", row.constraints_satisfied}});
        }
        for (const auto& n : rep.notes) notes.push_back(n);
        stages.push_back(rep.chosen_stage);
        design = {{"mode", "alpha_sweep"},
                  {"alpha_star", num(rep.alpha_star)},
                  {"q_star", num(rep.q_star)},
                  {"kind_at_star", to_string(rep.kind_at_star)},
                  {"k_m_at_star",
                   rep.kind_at_star == MarginalGainResult::Kind::finite ? num(rep.k_m_at_star) : json(nullptr)},
                  {"per_alpha", rows},
                  {"chosen_stage", to_json(rep.chosen_stage)},
                  {"flatness_band", band_json(d.flatness_band)},
                  {"flatness_before_deg", num(rep.flatness_before)},
                  {"flatness_after_deg", num(rep.flatness_after)}};

        if (d.cascade.enabled) {
            Band band{};
            if (d.cascade.band) {
                band = *d.cascade.band;
            } else {
                const MarginReport m = loop_margins(base_loop, config.analysis);
                if (!m.gain_crossover_wgc) throw Error("no gain crossover in analysis band");
                band = decade_around(*m.gain_crossover_wgc);
            }
            const auto extra = flatten_cascade(plant, controller, rep.chosen_stage, band, d.cascade.max_stages,
                                               {d.cascade.target_deg, d.band_points});
            stages.insert(stages.end(), extra.begin(), extra.end());
            design["cascade"] = {
                {"band", band_json(band)},
                {"target_deg", num(d.cascade.target_deg)},
                {"stages", stages_json(extra)},
                {"flatness_controller_only_deg", num(phase_flatness(base_loop, band, d.band_points))},
                {"flatness_base_stage_deg",
                 num(phase_flatness(shaped_loop(plant, controller, {rep.chosen_stage}), band, d.band_points))},
                {"flatness_after_deg", num(phase_flatness(shaped_loop(plant, controller, stages), band, d.band_points))}};
        }
    } else {
        const MarginReport m = loop_margins(base_loop, config.analysis);
        if (!m.gain_crossover_wgc) throw Error("no gain crossover in analysis band");
        const double w_gc = *m.gain_crossover_wgc;
        const FoStage stage = fit_flat_stage(plant, controller, d.form, w_gc);
        stages.push_back(stage);
        const double before = phase_slope(base_loop, w_gc);
        const double after = phase_slope(shaped_loop(plant, controller, {stage}), w_gc);
        const double reduction = before != 0.0 ? 100.0 * (1.0 - std::abs(after) / std::abs(before)) : 0.0;
        design = {{"mode", "fit_flat_stage"},
                  {"form", to_string(d.form)},
                  {"w_gc", num(w_gc)},
                  {"stage", to_json(stage)},
                  {"slope_before", num(before)},
                  {"slope_after", num(after)},
                  {"slope_reduction_pct", num(reduction)}};
        if (d.reference_q) {
            const double dist = std::abs(std::abs(stage.q) - std::abs(*d.reference_q));
            design["reference_q"] = num(*d.reference_q);
            design["reference_q_distance"] = num(dist);
            notes.push_back("fitted |q| = " + format_number(std::abs(stage.q)) + " is " + format_number(dist) +
                            " from reference |q| = " + format_number(std::abs(*d.reference_q)));
        }
        if (plant.delay() > 0.0) notes.push_back("slope evaluated on the exact dead time");
    }
    design["notes"] = notes;

    PipelineResult r;
    const json st = stages_json(stages);
    r.payload = {{"design", design}, {"stages", st}};
    r.files = {{"design.json", pretty(design)}, {"stages.json", pretty(st)}};
    return r;
}

PipelineResult run_simulate(const ProjectConfig& config) {
    if (!config.sim) throw ConfigError("sim", "missing field");
    const SimConfig& s = *config.sim;
    const TransferFunction plant = config.plant_tf();
    const double dt = s.dt ? *s.dt : default_dt(s.t_final, plant.delay());
    const IsoDampingReport rep = iso_damping_report(plant, config.controller_tf(), stage_chain(config.stages),
                                                    s.gain_multipliers, s.t_final, dt, s.threshold_pct,
                                                    s.tail_fraction);

    PipelineResult r;
    json runs = json::array(), series = json::array();
    for (const auto& run : rep.runs) {
        const std::string file = "step_" + multiplier_label(run.multiplier) + ".csv";
        json t = json::array(), y = json::array();
        std::string csv = "t_s,y\n";
        for (size_t i = 0; i < run.series.t.size(); ++i) {
            t.push_back(num(run.series.t[i]));
            y.push_back(num(run.series.y[i]));
            csv += cell(t.back()) + "," + cell(y.back()) + "\n";
        }
        r.files.push_back({file, csv});
        series.push_back({{"multiplier", num(run.multiplier)}, {"t_s", t}, {"y", y}});

        json entry = {{"multiplier", num(run.multiplier)}, {"diverged", run.diverged}, {"file", file}};
        if (run.report) {
            entry["overshoot_pct"] = num(run.report->overshoot_pct);
            entry["peak_time"] = num(run.report->peak_time);
            entry["settling_time_2pct"] = opt(run.report->settling_time_2pct);
            entry["final_value"] = num(run.report->final_value);
            entry["settled"] = run.report->settled;
        }
        runs.push_back(entry);
    }
    const double dt_used = rep.runs.empty() ? dt : rep.runs.front().series.dt;
    const json iso = {{"threshold_pct", num(rep.threshold_pct)},
                      {"spread_pct", opt(rep.spread_pct)},
                      {"pass", rep.pass},
                      {"any_diverged", rep.any_diverged},
                      {"t_final", num(s.t_final)},
                      {"dt", num(dt_used)},
                      {"runs", runs}};
    r.files.push_back({"isodamping.json", pretty(iso)});
    r.payload = {{"isodamping", iso}, {"series", series}};
    if (rep.any_diverged) r.exit_code = kExitDiverged;
    return r;
}

void write_artifacts(const PipelineResult& result, const std::string& dir) {
    std::filesystem::create_directories(dir);
    for (const auto& a : result.files) {
        const auto path = std::filesystem::path(dir) / a.name;
        std::ofstream out(path, std::ios::binary);
        if (!out) throw Error("cannot write " + path.string());
        out << a.content;
        if (!out) throw Error("cannot write " + path.string());
    }
}

} // namespace isodamp
