#pragma once

#include <optional>
#include <string>
#include <vector>

#include "isodamp/error.hpp"
#include "isodamp/lti.hpp"

namespace isodamp {

// Controllable canonical form of the delay-free part of a proper transfer
// function: x' = A x + B u, y = C x + D u, with A row-major n×n.
struct StateSpace {
    int n = 0;
    std::vector<double> A;
    std::vector<double> B;
    std::vector<double> C;
    double D = 0.0;

    double a(int i, int j) const { return A[static_cast<size_t>(i * n + j)]; }
};

StateSpace tf_to_statespace(const TransferFunction& g);

struct StepSeries {
    std::vector<double> t;
    std::vector<double> y;
    double dt = 0.0;
    double gain_label = 1.0;
};

class SimulationDiverged : public Error {
public:
    SimulationDiverged(StepSeries partial)
        : Error("response diverged"), partial_(std::move(partial)) {}
    const StepSeries& partial() const noexcept { return partial_; }

private:
    StepSeries partial_;
};

// min(0.001·t_final, delay/20)
double default_dt(double t_final, double delay);

// Unit-step response of the unity-negative-feedback loop around open_loop.
// Fixed-step RK4; the dead time is a sample-exact history buffer. When dt
// does not divide the delay it is reduced to delay/ceil(delay/dt).
StepSeries step_response(const TransferFunction& open_loop, double t_final, double dt);

// Unit-step response of g itself (no feedback, dead time honoured).
StepSeries open_loop_step(const TransferFunction& g, double t_final, double dt);

struct OvershootReport {
    double overshoot_pct = 0.0;
    double peak_time = 0.0;
    std::optional<double> settling_time_2pct;
    double final_value = 0.0;
    bool settled = true;
};

OvershootReport overshoot(const StepSeries& series, double tail_fraction = 0.2);

struct IsoDampingRun {
    double multiplier = 1.0;
    std::optional<OvershootReport> report;  // empty when the run diverged
    StepSeries series;
    bool diverged = false;
};

struct IsoDampingReport {
    std::vector<IsoDampingRun> runs;  // ascending multiplier
    std::optional<double> spread_pct;  // over surviving runs
    bool any_diverged = false;
    double threshold_pct = 2.0;
    bool pass = false;
};

IsoDampingReport iso_damping_report(const TransferFunction& plant, const TransferFunction& controller,
                                    const TransferFunction& shaper, const std::vector<double>& gain_multipliers,
                                    double t_final, double dt, double threshold_pct = 2.0,
                                    double tail_fraction = 0.2);

} // namespace isodamp
