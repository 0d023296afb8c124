#include "isodamp/shaper.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>

#include "isodamp/error.hpp"
#include "nelder_mead.hpp"

namespace isodamp {

namespace {

constexpr double kDeg = 180.0 / 3.14159265358979323846;

bool first_column_positive(const Polynomial& p) {
    const RouthTable t = routh_table(p);
    if (t.epsilon_substitutions != 0) return false;
    return std::all_of(t.first_column.begin(), t.first_column.end(), [](double v) { return v > 0.0; });
}

AlphaRow evaluate_alpha(const DesignSpec& spec, const TransferFunction& plant, double alpha) {
    const TransferFunction shaper = plain_shaper(alpha);
    auto poly_of_k = [&](double k) { return char_poly(plant, spec.controller, shaper, k, spec.convention); };
    AlphaRow row;
    row.alpha = alpha;
    MarginalGainResult mg;
    try {
        mg = marginal_gain(poly_of_k, spec.k_lo, spec.k_hi);
    } catch (const Error&) {
        // several stability windows in the bracket: not a usable candidate
        row.kind = MarginalGainResult::Kind::zero;
        return row;
    }
    row.kind = mg.kind;
    row.k_m = mg.k_m;
    if (mg.kind == MarginalGainResult::Kind::zero) return row;

    // sampled certificate that the whole first column stays positive below K_m
    const double upper = mg.kind == MarginalGainResult::Kind::finite ? mg.k_m * (1.0 - 1e-6) : spec.k_hi;
    bool ok = upper > spec.k_lo;
    if (ok) {
        for (double k : log_grid(spec.k_lo, upper, 16)) ok = ok && first_column_positive(poly_of_k(k));
    }
    if (ok && mg.kind == MarginalGainResult::Kind::finite && mg.k_m / 2.0 > spec.k_lo)
        ok = first_column_positive(poly_of_k(mg.k_m / 2.0));
    row.constraints_satisfied = ok;
    return row;
}

std::vector<AlphaRow> sweep(const DesignSpec& spec, const TransferFunction& plant, const std::vector<double>& grid) {
    std::vector<std::future<AlphaRow>> jobs;
    jobs.reserve(grid.size());
    for (double alpha : grid)
        jobs.push_back(std::async(std::launch::async, [&spec, &plant, alpha] { return evaluate_alpha(spec, plant, alpha); }));
    std::vector<AlphaRow> rows;
    rows.reserve(grid.size());
    for (auto& j : jobs) rows.push_back(j.get());
    return rows;
}

// Larger margin wins; unbounded beats finite; ties go to the α nearest 1.
bool better(const AlphaRow& a, const AlphaRow& b) {
    using Kind = MarginalGainResult::Kind;
    auto rank = [](Kind k) { return k == Kind::unbounded ? 2 : k == Kind::finite ? 1 : 0; };
    if (rank(a.kind) != rank(b.kind)) return rank(a.kind) > rank(b.kind);
    if (a.kind == Kind::finite) {
        const double tol = 1e-9 * std::max(a.k_m, b.k_m);
        if (std::abs(a.k_m - b.k_m) > tol) return a.k_m > b.k_m;
    }
    return std::abs(a.alpha - 1.0) < std::abs(b.alpha - 1.0);
}

const AlphaRow* pick(const std::vector<AlphaRow>& rows) {
    const AlphaRow* best = nullptr;
    for (const auto& r : rows) {
        if (!r.constraints_satisfied || r.kind == MarginalGainResult::Kind::zero) continue;
        if (!best || better(r, *best)) best = &r;
    }
    return best;
}

std::vector<double> band_grid(Band band, int n) {
    if (!(band.lo > 0.0 && band.lo < band.hi)) throw Error("invalid frequency band");
    if (n < 16) throw Error("band needs at least 16 points");
    return log_grid(band.lo, band.hi, n);
}

double spread_deg(const TransferFunction& g, const std::vector<double>& w) {
    for (double wi : w) {
        const std::complex<double> jw{0.0, wi};
        if (std::abs(g.den()(jw)) < 1e-300) throw Error("pole on band grid point");
    }
    const std::vector<double> ph = relative_phase(g, w);
    const auto [lo, hi] = std::minmax_element(ph.begin(), ph.end());
    return (*hi - *lo) * kDeg;
}

FoStage make_shifted(StageKind kind, double alpha, double a) {
    return FoStage::from_alpha(kind, alpha, a);
}

} // namespace

void DesignSpec::validate() const {
    if (alpha_grid.empty()) throw Error("alpha grid is empty");
    for (size_t i = 0; i < alpha_grid.size(); ++i) {
        if (!(alpha_grid[i] > 0.0)) throw Error("alpha grid values must be > 0");
        if (i > 0 && !(alpha_grid[i] > alpha_grid[i - 1])) throw Error("alpha grid must be strictly increasing");
    }
    if (!(k_lo > 0.0 && k_lo < k_hi)) throw Error("gain bracket must satisfy 0 < k_lo < k_hi");
    if (pade_order < 1 || pade_order > 5) throw Error("pade order out of range");
    if (!(flatness_band.lo > 0.0 && flatness_band.lo < flatness_band.hi)) throw Error("invalid flatness band");
    if (band_points < 16) throw Error("band needs at least 16 points");
}

TransferFunction plain_shaper(double alpha) { return {Polynomial{1.0, alpha}, Polynomial{alpha, 1.0}}; }

TransferFunction shaped_loop(const TransferFunction& plant, const TransferFunction& controller,
                             const std::vector<FoStage>& stages) {
    TransferFunction loop = series(controller, plant);
    for (const auto& st : stages) loop = series(realize_first_order(st), loop);
    return loop;
}

DesignReport design_alpha(const DesignSpec& spec) {
    spec.validate();
    const TransferFunction plant = rationalize(spec.plant, spec.pade_order);

    DesignReport report;
    report.per_alpha = sweep(spec, plant, spec.alpha_grid);
    const AlphaRow* best = pick(report.per_alpha);
    if (!best) throw InfeasibleDesign("design infeasible on grid");
    AlphaRow star = *best;

    if (spec.refine && star.kind == MarginalGainResult::Kind::finite && spec.alpha_grid.size() > 1) {
        const auto it = std::find(spec.alpha_grid.begin(), spec.alpha_grid.end(), star.alpha);
        const size_t i = static_cast<size_t>(it - spec.alpha_grid.begin());
        const double lo = i > 0 ? spec.alpha_grid[i - 1] : star.alpha;
        const double hi = i + 1 < spec.alpha_grid.size() ? spec.alpha_grid[i + 1] : star.alpha;
        std::vector<double> fine;
        for (int k = 1; k < 20; ++k) {
            const double a = lo + (hi - lo) * k / 20.0;
            if (a != star.alpha) fine.push_back(a);
        }
        auto extra = sweep(spec, plant, fine);
        if (const AlphaRow* r = pick(extra); r && better(*r, star)) star = *r;
        report.per_alpha.insert(report.per_alpha.end(), extra.begin(), extra.end());
        std::sort(report.per_alpha.begin(), report.per_alpha.end(),
                  [](const AlphaRow& a, const AlphaRow& b) { return a.alpha < b.alpha; });
        report.notes.push_back("alpha grid refined 10x around the incumbent");
    }

    report.alpha_star = star.alpha;
    report.kind_at_star = star.kind;
    report.k_m_at_star = star.k_m;
    report.q_star = order_from_alpha(star.alpha);
    report.chosen_stage = FoStage::from_alpha(StageKind::differintegrator, star.alpha);

    const TransferFunction before = series(spec.controller, spec.plant);
    report.flatness_before = phase_flatness(before, spec.flatness_band, spec.band_points);
    report.flatness_after = phase_flatness(series(plain_shaper(star.alpha), before), spec.flatness_band,
                                           spec.band_points);

    if (spec.convention == GainConvention::tableau)
        report.notes.push_back("loop gain convention: tableau (den + K*num; the 1/alpha factor on K is omitted)");
    else
        report.notes.push_back("loop gain convention: literal (den + (K/alpha)*num)");
    if (star.kind == MarginalGainResult::Kind::unbounded)
        report.notes.push_back("margin unbounded: loop stays Hurwitz up to k_hi; alpha chosen nearest 1");
    if (spec.plant.delay() > 0.0)
        report.notes.push_back("dead time replaced by Pade order " + std::to_string(spec.pade_order) +
                               " for Routh analysis only");
    report.notes.push_back("phase margin computed from frequency response");
    return report;
}

double phase_flatness(const TransferFunction& open_loop, Band band, int n) {
    return spread_deg(open_loop, band_grid(band, n));
}

std::optional<FoStage> invert_peak_and_boost(double w_r, double boost_deg) {
    if (!(std::abs(boost_deg) < 90.0)) throw Error("boost out of range");
    if (!(w_r >= 1.0)) return std::nullopt;
    if (boost_deg == 0.0) return FoStage{};

    // alpha realizing the boost for a given shift a; boost falls monotonically in alpha
    auto alpha_for = [&](double a) {
        double lo = std::log(1e-9), hi = std::log(1e9);
        for (int i = 0; i < 200; ++i) {
            const double mid = 0.5 * (lo + hi);
            const FoStage st = make_shifted(StageKind::shifted_pow, std::exp(mid), a);
            const double boost = a == 0.0 ? phase_boost(st, 1.0) : phase_boost(st, peak_frequency(st));
            (boost > boost_deg ? lo : hi) = mid;
        }
        return std::exp(0.5 * (lo + hi));
    };
    auto center = [&](double a) {
        const double alpha = alpha_for(a);
        return std::sqrt((alpha + a) * (1.0 + alpha * a) / alpha);
    };
    if (w_r == 1.0) return make_shifted(StageKind::shifted_pow, alpha_for(0.0), 0.0);

    double lo = 0.0, hi = 1.0;
    while (center(hi) < w_r) {
        hi *= 2.0;
        if (hi > 1e12) return std::nullopt;
    }
    for (int i = 0; i < 200 && (hi - lo) > 1e-13 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        (center(mid) < w_r ? lo : hi) = mid;
    }
    const double a = 0.5 * (lo + hi);
    return make_shifted(StageKind::shifted_pow, alpha_for(a), a);
}

std::vector<FoStage> flatten_cascade(const TransferFunction& plant, const TransferFunction& controller,
                                     const FoStage& base, Band band, int max_stages,
                                     const CascadeOptions& options) {
    const std::vector<double> w = band_grid(band, options.band_points);
    TransferFunction loop = shaped_loop(plant, controller, {base});
    double current = spread_deg(loop, w);
    std::vector<FoStage> stages;

    while (static_cast<int>(stages.size()) < max_stages && current > options.target_deg) {
        const std::vector<double> ph = relative_phase(loop, w);
        const auto [mn, mx] = std::minmax_element(ph.begin(), ph.end());
        const double mid = 0.5 * (*mn + *mx);
        size_t worst = 0;
        for (size_t i = 1; i < ph.size(); ++i)
            if (std::abs(ph[i] - mid) > std::abs(ph[worst] - mid)) worst = i;
        const double boost = -(ph[worst] - mid) * kDeg;
        if (!(std::abs(boost) < 90.0)) throw Error("boost out of range");

        auto objective = [&](StageKind kind, double log_alpha, double log_a) {
            const double alpha = std::exp(std::clamp(log_alpha, -12.0, 12.0));
            const double a = std::exp(std::clamp(log_a, -20.0, 12.0));
            const FoStage st = make_shifted(kind, alpha, a);
            try {
                return spread_deg(series(realize_first_order(st), loop), w);
            } catch (const Error&) {
                return std::numeric_limits<double>::infinity();
            }
        };

        struct Candidate {
            StageKind kind;
            double log_alpha, log_a, f;
        };
        std::vector<Candidate> seeds;
        if (auto s = invert_peak_and_boost(w[worst], boost); s && s->a > 0.0) {
            seeds.push_back({StageKind::shifted_pow, std::log(s->alpha), std::log(s->a),
                             objective(StageKind::shifted_pow, std::log(s->alpha), std::log(s->a))});
        }
        for (StageKind kind : {StageKind::shifted_pow, StageKind::shifted_sum}) {
            for (int i = 0; i <= 12; ++i) {
                for (int j = 0; j <= 9; ++j) {
                    const double la = -3.0 + 0.5 * i;
                    const double ls = -6.0 + 1.0 * j;
                    seeds.push_back({kind, la, ls, objective(kind, la, ls)});
                }
            }
        }
        std::stable_sort(seeds.begin(), seeds.end(), [](const Candidate& a, const Candidate& b) { return a.f < b.f; });
        seeds.resize(std::min<size_t>(seeds.size(), 8));

        Candidate best = seeds.front();
        for (const auto& s : seeds) {
            auto f = [&](const std::array<double, 2>& x) { return objective(s.kind, x[0], x[1]); };
            const auto m = detail::nelder_mead(f, {s.log_alpha, s.log_a}, 0.25, 600);
            if (m.f < best.f) best = {s.kind, m.x[0], m.x[1], m.f};
        }
        if (!(best.f < current * (1.0 - 1e-9))) break;

        const FoStage st = make_shifted(best.kind, std::exp(std::clamp(best.log_alpha, -12.0, 12.0)),
                                        std::exp(std::clamp(best.log_a, -20.0, 12.0)));
        stages.push_back(st);
        loop = series(realize_first_order(st), loop);
        current = spread_deg(loop, w);
    }
    return stages;
}

FoStage fit_flat_stage(const TransferFunction& plant, const TransferFunction& controller, StageKind form,
                       double w_gc, const FitOptions& options) {
    if (!(w_gc > 0.0)) throw Error("w_gc must be > 0");
    const TransferFunction base = series(controller, plant);
    const double s0 = std::abs(phase_slope(base, w_gc));
    if (s0 < 1e-10) return FoStage::from_order(form == StageKind::shifted_pow ? StageKind::differintegrator : form, 0.0);

    const double ql = options.q_limit;
    auto stage_for = [&](double q, double log_a) {
        const double qc = std::clamp(q, -ql, ql);
        const double a = form == StageKind::differintegrator
                             ? 0.0
                             : std::exp(std::clamp(log_a, std::log(options.a_min), std::log(options.a_max)));
        return FoStage::from_order(form, qc, a);
    };
    auto objective = [&](double q, double log_a) {
        return std::abs(phase_slope(series(realize_first_order(stage_for(q, log_a)), base), w_gc));
    };

    FoStage best_stage;
    double best = std::numeric_limits<double>::infinity();
    if (form == StageKind::differintegrator) {
        double q_best = 0.0;
        const int n = 397;
        for (int i = 0; i < n; ++i) {
            const double q = -ql + 2.0 * ql * i / (n - 1);
            const double f = objective(q, 0.0);
            if (f < best) {
                best = f;
                q_best = q;
            }
        }
        // golden-section refinement inside the neighbouring scan cells
        const double h = 2.0 * ql / (n - 1);
        double a = std::max(-ql, q_best - h), b = std::min(ql, q_best + h);
        const double g = 0.5 * (std::sqrt(5.0) - 1.0);
        double c = b - g * (b - a), d = a + g * (b - a);
        for (int i = 0; i < 100; ++i) {
            if (objective(c, 0.0) < objective(d, 0.0)) b = d;
            else a = c;
            c = b - g * (b - a);
            d = a + g * (b - a);
        }
        const double q = 0.5 * (a + b);
        if (objective(q, 0.0) < best) q_best = q;
        best_stage = stage_for(q_best, 0.0);
        best = objective(q_best, 0.0);
    } else {
        struct Seed {
            double q, log_a, f;
        };
        std::vector<Seed> seeds;
        const double la_lo = std::log(options.a_min), la_hi = std::log(options.a_max);
        for (int i = 0; i <= 98; ++i) {
            const double q = -ql + 2.0 * ql * i / 98.0;
            for (int j = 0; j <= 60; ++j) {
                const double la = la_lo + (la_hi - la_lo) * j / 60.0;
                seeds.push_back({q, la, objective(q, la)});
            }
        }
        std::stable_sort(seeds.begin(), seeds.end(), [](const Seed& a, const Seed& b) { return a.f < b.f; });
        seeds.resize(6);
        Seed top = seeds.front();
        for (const auto& s : seeds) {
            auto f = [&](const std::array<double, 2>& x) { return objective(x[0], x[1]); };
            const auto m = detail::nelder_mead(f, {s.q, s.log_a}, 0.02, 800, 1e-14);
            if (m.f < top.f) top = {m.x[0], m.x[1], m.f};
        }
        best_stage = stage_for(top.q, top.log_a);
        best = objective(top.q, top.log_a);
    }
    if (!(best < s0)) throw Error("no flattening stage found");
    return best_stage;
}

} // namespace isodamp
