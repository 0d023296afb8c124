#include <doctest.h>

#include "isodamp/config.hpp"

using namespace isodamp;
using nlohmann::json;

namespace {

const std::string kConfigDir = ISODAMP_CONFIG_DIR;

json minimal() {
    return json::parse(R"({"plant": {"num": [1], "den": [1, 1]}, "controller": {"kp": 1}})");
}

std::string error_path(const json& j) {
    try {
        config_from_json(j);
    } catch (const ConfigError& e) {
        return e.path();
    }
    return "<accepted>";
}

} // namespace

TEST_CASE("bundled configs load") {
    const auto dc = load_config(kConfigDir + "/dcmotor.json");
    CHECK(dc.plant.den == std::vector<double>{0.005, 0.06, 0.1001});
    CHECK(dc.controller.kp == 1.64);
    REQUIRE(dc.stages.size() == 1);
    CHECK(dc.stages[0].alpha == 0.5);
    CHECK(dc.design->alpha_grid.size() == 19);
    CHECK(dc.design->cascade.enabled);

    const auto fo = load_config(kConfigDir + "/foptd.json");
    CHECK(fo.plant.delay == 1.0);
    CHECK(fo.design->mode == DesignMode::fit_flat_stage);
    CHECK(fo.sim->gain_multipliers.size() == 5);
}

TEST_CASE("defaults") {
    const auto c = config_from_json(minimal());
    CHECK(c.stages.empty());
    CHECK_FALSE(c.design);
    CHECK_FALSE(c.sim);
    CHECK(c.analysis.points_per_decade == 200);
    auto j = minimal();
    j["design"] = json::object();
    CHECK(config_from_json(j).design->alpha_grid == default_alpha_grid());
}

TEST_CASE("round trip is idempotent") {
    for (const char* name : {"/dcmotor.json", "/foptd.json"}) {
        const auto first = dump_config(load_config(kConfigDir + name));
        const auto second = dump_config(parse_config(first));
        CHECK(first == second);
    }
    auto j = minimal();
    j["stages"] = json::parse(R"([{"kind": "shifted_sum", "alpha": 0.3, "a": 2, "gain_k": 1.5}])");
    const auto first = dump_config(config_from_json(j));
    CHECK(dump_config(parse_config(first)) == first);
    CHECK(config_hash(parse_config(first)) == config_hash(config_from_json(j)));
}

TEST_CASE("field-path diagnostics") {
    auto j = minimal();
    j["plant"]["den"] = json::array();
    CHECK(error_path(j) == "plant.den");

    j = minimal();
    j["plant"]["den"] = {0, 0};
    CHECK(error_path(j) == "plant.den");

    j = minimal();
    j["bogus"] = 1;
    CHECK(error_path(j) == "bogus");
    try {
        config_from_json(j);
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("unknown field") != std::string::npos);
    }

    j = minimal();
    j["stages"] = json::parse(R"([{"kind": "differintegrator", "q": 0.3}, {"kind": "shifted_pow", "q": 1.5}])");
    CHECK(error_path(j) == "stages[1].q");

    j = minimal();
    j["stages"] = json::parse(R"([{"kind": "lead", "q": 0.3}])");
    CHECK(error_path(j) == "stages[0].kind");

    j = minimal();
    j["design"] = json::parse(R"({"alpha_grid": [0.2, 0.1]})");
    CHECK(error_path(j) == "design.alpha_grid[1]");

    j = minimal();
    j["design"] = json::parse(R"({"cascade": {"max_stages": -1}})");
    CHECK(error_path(j) == "design.cascade.max_stages");

    j = minimal();
    j["sim"] = json::parse(R"({"gain_multipliers": [1, -1]})");
    CHECK(error_path(j) == "sim.gain_multipliers[1]");

    j = minimal();
    j["plant"]["delay"] = 1;
    j["sim"] = json::parse(R"({"dt": 0.5})");
    CHECK(error_path(j) == "sim.dt");

    j = minimal();
    j["controller"] = json::parse(R"({"kp": 0})");
    CHECK(error_path(j) == "controller");

    j = minimal();
    j["controller"]["kp"] = "one";
    CHECK(error_path(j) == "controller.kp");

    CHECK_THROWS_AS(parse_config("{not json"), ConfigError);
}

TEST_CASE("number formatting") {
    CHECK(format_number(0.1) == "0.1");
    CHECK(format_number(1.0 / 3.0) == "0.333333333333");
    CHECK(num(1.0 / 3.0).dump() == "0.333333333333");
    CHECK(num(std::nan("")).is_null());
}
