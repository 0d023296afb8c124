#include <iostream>
#include <string>
#include <utility>

#include <CLI11.hpp>

#include "isodamp/api.hpp"
#include "isodamp/pipeline.hpp"

using namespace isodamp;

namespace {

int run(const std::string& command, const std::string& config_path, const std::string& out_dir) {
    try {
        const ProjectConfig config = load_config(config_path);
        PipelineResult result;
        if (command == "analyze") result = run_analyze(config);
        else if (command == "design") result = run_design(config);
        else result = run_simulate(config);
        write_artifacts(result, out_dir.empty() ? config.outputs : out_dir);
        if (result.exit_code == kExitDiverged) std::cerr << "isodamp: some runs diverged\n";
        return result.exit_code;
    } catch (const ConfigError& e) {
        std::cerr << "isodamp: invalid config: " << e.what() << "\n";
        return kExitInvalidConfig;
    } catch (const InfeasibleDesign& e) {
        std::cerr << "isodamp: " << e.what() << "\n";
        return kExitInfeasible;
    } catch (const std::exception& e) {
        std::cerr << "isodamp: " << e.what() << "\n";
        return kExitFailure;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fractional-order phase shaper design toolkit"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    const std::pair<const char*, const char*> commands[] = {
        {"analyze", "Bode data, margins and phase flatness"},
        {"design", "shaper order sweep or flat-phase stage fit"},
        {"simulate", "step responses across gain multipliers"}};
    for (const auto& [name, help] : commands) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("config", config_path, "project config (JSON)")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", out_dir, "output directory (default: config outputs)");
    }

    std::string bind = "127.0.0.1";
    int port = 8700;
    auto* serve_cmd = app.add_subcommand("serve", "start the HTTP API");
    serve_cmd->add_option("config", config_path, "ignored; accepted for symmetry");
    serve_cmd->add_option("--bind", bind, "bind address");
    serve_cmd->add_option("--port", port, "port")->check(CLI::Range(0, 65535));

    CLI11_PARSE(app, argc, argv);

    if (serve_cmd->parsed()) {
        try {
            std::cerr << "isodamp: serving on " << bind << ":" << port << "\n";
            serve(bind, port);
            return kExitOk;
        } catch (const std::exception& e) {
            std::cerr << "isodamp: " << e.what() << "\n";
            return kExitFailure;
        }
    }
    return run(app.get_subcommands().front()->get_name(), config_path, out_dir);
}
