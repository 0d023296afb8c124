#include <doctest.h>

#include <cmath>

#include "isodamp/pipeline.hpp"
#include "isodamp/shaper.hpp"

using namespace isodamp;
using doctest::Approx;

namespace {

TransferFunction dc_motor() { return {Polynomial{0.01}, Polynomial{0.005, 0.06, 0.1001}}; }
TransferFunction foptd() { return {Polynomial{5.0}, Polynomial{1.5, 1.0}, 1.0}; }

DesignSpec spec_for(TransferFunction plant, TransferFunction controller, std::vector<double> grid) {
    DesignSpec s;
    s.plant = std::move(plant);
    s.controller = std::move(controller);
    s.alpha_grid = std::move(grid);
    return s;
}

std::vector<double> grid(double lo, double step, int n) {
    std::vector<double> g;
    for (int i = 0; i < n; ++i) g.push_back(lo + step * i);
    return g;
}

} // namespace

TEST_CASE("DesignSpec validation") {
    auto s = spec_for(dc_motor(), pid_tf(1.64, 2.64, 0.0), {0.5, 0.4});
    CHECK_THROWS_AS(s.validate(), Error);
    s.alpha_grid = {0.0, 0.4};
    CHECK_THROWS_AS(s.validate(), Error);
    s.alpha_grid = {0.4};
    s.band_points = 8;
    CHECK_THROWS_AS(s.validate(), Error);
}

TEST_CASE("design_alpha on a first-order loop is unbounded everywhere") {
    const auto rep = design_alpha(spec_for({Polynomial{1.0}, Polynomial{1.0, 1.0}}, TransferFunction{},
                                           grid(0.1, 0.1, 9)));
    CHECK(rep.per_alpha.size() == 9);
    for (const auto& row : rep.per_alpha) CHECK(row.kind == MarginalGainResult::Kind::unbounded);
    CHECK(rep.alpha_star == Approx(0.9));
    CHECK(rep.kind_at_star == MarginalGainResult::Kind::unbounded);
    bool flagged = false;
    for (const auto& n : rep.notes) flagged |= n.find("margin unbounded") != std::string::npos;
    CHECK(flagged);
}

TEST_CASE("design_alpha singleton grid") {
    const auto rep = design_alpha(spec_for(dc_motor(), pid_tf(1.64, 2.64, 0.0), {0.5}));
    CHECK(rep.per_alpha.size() == 1);
    CHECK(rep.alpha_star == 0.5);
    CHECK(rep.q_star == Approx(1.0 / 3.0));
    CHECK(rep.chosen_stage.kind == StageKind::differintegrator);
}

TEST_CASE("design_alpha on the FOPTD loop picks the largest finite margin") {
    const auto rep = design_alpha(spec_for(foptd(), pid_tf(0.364, 0.22, 0.149), grid(0.1, 0.1, 9)));
    CHECK(rep.kind_at_star == MarginalGainResult::Kind::finite);
    double best = 0.0;
    for (const auto& row : rep.per_alpha) {
        REQUIRE(row.kind == MarginalGainResult::Kind::finite);
        if (row.constraints_satisfied) best = std::max(best, row.k_m);
    }
    CHECK(rep.k_m_at_star == best);
    for (const auto& row : rep.per_alpha)
        if (row.k_m == best) CHECK(row.alpha == rep.alpha_star);
    // certificate: first column strictly positive at K_m/2
    const TransferFunction plant = rationalize(foptd(), 3);
    const auto t = routh_table(char_poly(plant, pid_tf(0.364, 0.22, 0.149), plain_shaper(rep.alpha_star),
                                         rep.k_m_at_star / 2.0));
    for (double v : t.first_column) CHECK(v > 0.0);
    // determinism
    const auto again = design_alpha(spec_for(foptd(), pid_tf(0.364, 0.22, 0.149), grid(0.1, 0.1, 9)));
    CHECK(again.alpha_star == rep.alpha_star);
    CHECK(again.k_m_at_star == rep.k_m_at_star);
}

TEST_CASE("design_alpha picks a differentiator for the DC motor") {
    const auto rep = design_alpha(spec_for(dc_motor(), pid_tf(1.64, 2.64, 0.0), grid(0.05, 0.05, 19)));
    CHECK(rep.q_star > 0.0);
    CHECK(rep.alpha_star < 1.0);
}

TEST_CASE("design_alpha infeasible grid") {
    const TransferFunction triple{Polynomial{1.0}, Polynomial{1.0, 0.0, 0.0, 0.0}};
    CHECK_THROWS_WITH_AS(design_alpha(spec_for(triple, TransferFunction{}, {0.5, 0.7})), "design infeasible on grid",
                         InfeasibleDesign);
}

TEST_CASE("phase_flatness") {
    CHECK(phase_flatness(TransferFunction::gain(4.0), {0.1, 10.0}, 64) == Approx(0.0));
    CHECK(phase_flatness({Polynomial{1.0}, Polynomial{1.0, 0.0}}, {0.1, 10.0}, 64) == Approx(0.0));
    const TransferFunction loop = series(pid_tf(1.64, 2.64, 0.0), dc_motor());
    CHECK(phase_flatness(loop, {0.5, 20.0}, 200) > 0.0);
    CHECK_THROWS_AS(phase_flatness({Polynomial{1.0}, Polynomial{1.0, 0.0, 1.0}}, {0.1, 10.0}, 101), Error);
}

TEST_CASE("flatten_cascade") {
    const TransferFunction plant = dc_motor();
    const TransferFunction pi = pid_tf(1.64, 2.64, 0.0);
    const FoStage base = FoStage::from_alpha(StageKind::differintegrator, 0.5);
    CHECK(flatten_cascade(plant, pi, base, {0.5, 60.0}, 0).empty());
    // a flat loop needs nothing
    CHECK(flatten_cascade({Polynomial{1.0}, Polynomial{1.0, 0.0}}, TransferFunction{},
                          FoStage::from_order(StageKind::differintegrator, 0.0), {0.1, 10.0}, 2)
              .empty());

    const Band band{0.5, 60.0};
    const auto stages = flatten_cascade(plant, pi, base, band, 2, {0.5, 200});
    REQUIRE_FALSE(stages.empty());
    std::vector<FoStage> chain{base};
    double previous = phase_flatness(shaped_loop(plant, pi, chain), band, 200);
    for (const auto& st : stages) {
        CHECK(st.kind != StageKind::differintegrator);
        chain.push_back(st);
        const double now = phase_flatness(shaped_loop(plant, pi, chain), band, 200);
        CHECK(now <= previous);
        previous = now;
    }
}

TEST_CASE("invert_peak_and_boost") {
    const auto st = invert_peak_and_boost(2.0, -20.0);
    REQUIRE(st);
    CHECK(peak_frequency(*st) == Approx(2.0).epsilon(1e-6));
    CHECK(phase_boost(*st, 2.0) == Approx(-20.0).epsilon(1e-6));
    CHECK_FALSE(invert_peak_and_boost(0.5, 10.0));
}

TEST_CASE("fit_flat_stage") {
    const TransferFunction integrator{Polynomial{1.0}, Polynomial{1.0, 0.0}};
    const auto flat = fit_flat_stage(integrator, TransferFunction{}, StageKind::differintegrator, 1.0);
    CHECK(flat.q == Approx(0.0));

    const TransferFunction plant = foptd();
    const TransferFunction pid = pid_tf(0.364, 0.22, 0.149);
    const auto m = margins(series(pid, plant), 0.01, 100.0, 801);
    REQUIRE(m.gain_crossover_wgc);
    const double w = *m.gain_crossover_wgc;
    const double before = std::abs(phase_slope(series(pid, plant), w));
    for (StageKind kind : {StageKind::differintegrator, StageKind::shifted_sum, StageKind::shifted_pow}) {
        const FoStage st = fit_flat_stage(plant, pid, kind, w);
        CHECK(std::abs(phase_slope(shaped_loop(plant, pid, {st}), w)) <= before);
    }
    CHECK_THROWS_AS(fit_flat_stage(plant, pid, StageKind::shifted_sum, 0.0), Error);
}

TEST_CASE("shaped_loop and stage_chain") {
    const auto base = FoStage::from_alpha(StageKind::differintegrator, 0.5);
    const auto loop = shaped_loop(dc_motor(), pid_tf(1.64, 2.64, 0.0), {base});
    CHECK(loop.den().degree() == 4);
    CHECK(stage_chain({}).num() == Polynomial{1.0});
    CHECK(stage_chain({base}).num() == Polynomial{1.0, 0.5});
    CHECK(decade_around(1.0).hi / decade_around(1.0).lo == Approx(10.0));
}
