#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "isodamp/config.hpp"

namespace isodamp {

enum ExitCode : int {
    kExitOk = 0,
    kExitFailure = 1,
    kExitInvalidConfig = 2,
    kExitInfeasible = 3,
    kExitDiverged = 4,
};

struct Artifact {
    std::string name;
    std::string content;
};

// payload is what the HTTP facade returns; files are rendered from it, so
// both carry the same numbers.
struct PipelineResult {
    nlohmann::json payload;
    std::vector<Artifact> files;
    int exit_code = kExitOk;
};

// bode.csv, margins.json, flatness.json
PipelineResult run_analyze(const ProjectConfig& config);
// design.json, stages.json
PipelineResult run_design(const ProjectConfig& config);
// step_<multiplier>.csv, isodamping.json; exit code 4 when any run diverged
PipelineResult run_simulate(const ProjectConfig& config);

void write_artifacts(const PipelineResult& result, const std::string& dir);

// Product of the realized stages (unity for an empty list).
TransferFunction stage_chain(const std::vector<FoStage>& stages);

// [w/sqrt(10), w*sqrt(10)]
Band decade_around(double w);

} // namespace isodamp
