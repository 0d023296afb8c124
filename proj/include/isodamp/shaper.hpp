#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "isodamp/carlson.hpp"
#include "isodamp/lti.hpp"
#include "isodamp/routh.hpp"

namespace isodamp {

struct Band {
    double lo = 0.0;  // rad/s
    double hi = 0.0;
};

struct DesignSpec {
    TransferFunction plant;
    TransferFunction controller;
    std::vector<double> alpha_grid;
    double k_lo = 0.1;
    double k_hi = 1e4;
    int pade_order = 3;
    Band flatness_band{0.5, 20.0};
    int band_points = 200;
    GainConvention convention = GainConvention::tableau;
    // one 10x refinement of the grid around the incumbent
    bool refine = false;

    void validate() const;
};

struct AlphaRow {
    double alpha = 0.0;
    MarginalGainResult::Kind kind = MarginalGainResult::Kind::zero;
    double k_m = 0.0;
    bool constraints_satisfied = false;
};

struct DesignReport {
    double alpha_star = 1.0;
    MarginalGainResult::Kind kind_at_star = MarginalGainResult::Kind::zero;
    double k_m_at_star = 0.0;
    std::vector<AlphaRow> per_alpha;
    FoStage chosen_stage;
    double q_star = 0.0;
    double flatness_before = 0.0;  // degrees
    double flatness_after = 0.0;
    std::vector<std::string> notes;
};

// (s+α)/(αs+1)
TransferFunction plain_shaper(double alpha);

// Sweeps alpha_grid for the largest marginal gain of 1 + K·shaper·C·G whose
// Routh first column stays strictly positive below K_m. Throws
// InfeasibleDesign when no α is stable anywhere in the bracket.
DesignReport design_alpha(const DesignSpec& spec);

// max - min of the unwrapped open-loop phase over n log-spaced points (deg).
double phase_flatness(const TransferFunction& open_loop, Band band, int n);

struct CascadeOptions {
    double target_deg = 5.0;
    int band_points = 200;
};

// Greedy cascade of shifted stages appended after `base` until the phase
// spread over `band` falls under the target or the stage budget runs out.
// Each accepted stage strictly lowers the spread.
std::vector<FoStage> flatten_cascade(const TransferFunction& plant, const TransferFunction& controller,
                                     const FoStage& base, Band band, int max_stages,
                                     const CascadeOptions& options = {});

// (α, a) of a shifted_pow stage peaking at w_r with the given boost in
// degrees, by nested bisection over the peak-frequency and boost relations.
// Returns nullopt when no a >= 0 realizes it (w_r < 1 rad/s).
std::optional<FoStage> invert_peak_and_boost(double w_r, double boost_deg);

struct FitOptions {
    double q_limit = 0.99;
    double a_min = 1e-3;
    double a_max = 1e3;
};

// Stage of the given kind minimizing |d(phase)/dw| of stage·C·G at w_gc.
FoStage fit_flat_stage(const TransferFunction& plant, const TransferFunction& controller, StageKind form,
                       double w_gc, const FitOptions& options = {});

// The loop shaper·controller·plant for an ordered stage list.
TransferFunction shaped_loop(const TransferFunction& plant, const TransferFunction& controller,
                             const std::vector<FoStage>& stages);

} // namespace isodamp
