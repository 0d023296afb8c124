#include "isodamp/sim.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numeric>

namespace isodamp {

StateSpace tf_to_statespace(const TransferFunction& g) {
    if (!g.is_proper()) throw Error("improper transfer function");
    const int n = g.den().degree();
    const double lead = g.den().leading();

    StateSpace ss;
    ss.n = n;
    // monic denominator a_n s^n + ... with a_n = 1
    std::vector<double> den(static_cast<size_t>(n) + 1), num(static_cast<size_t>(n) + 1, 0.0);
    for (int p = 0; p <= n; ++p) {
        den[static_cast<size_t>(p)] = g.den().coefficient(p) / lead;
        num[static_cast<size_t>(p)] = g.num().coefficient(p) / lead;
    }
    ss.D = num[static_cast<size_t>(n)];
    ss.A.assign(static_cast<size_t>(n * n), 0.0);
    ss.B.assign(static_cast<size_t>(n), 0.0);
    ss.C.assign(static_cast<size_t>(n), 0.0);
    if (n == 0) return ss;
    for (int i = 0; i + 1 < n; ++i) ss.A[static_cast<size_t>(i * n + i + 1)] = 1.0;
    for (int j = 0; j < n; ++j) {
        ss.A[static_cast<size_t>((n - 1) * n + j)] = -den[static_cast<size_t>(j)];
        ss.C[static_cast<size_t>(j)] = num[static_cast<size_t>(j)] - ss.D * den[static_cast<size_t>(j)];
    }
    ss.B[static_cast<size_t>(n - 1)] = 1.0;
    return ss;
}

double default_dt(double t_final, double delay) {
    double dt = 0.001 * t_final;
    if (delay > 0.0) dt = std::min(dt, delay / 20.0);
    return dt;
}

namespace {

using Vec = std::vector<double>;

struct Integrator {
    const StateSpace& ss;

    Vec deriv(const Vec& x, double u) const {
        Vec dx(x.size(), 0.0);
        for (int i = 0; i < ss.n; ++i) {
            double acc = ss.B[static_cast<size_t>(i)] * u;
            for (int j = 0; j < ss.n; ++j) acc += ss.a(i, j) * x[static_cast<size_t>(j)];
            dx[static_cast<size_t>(i)] = acc;
        }
        return dx;
    }

    double output(const Vec& x, double u) const {
        double acc = ss.D * u;
        for (int i = 0; i < ss.n; ++i) acc += ss.C[static_cast<size_t>(i)] * x[static_cast<size_t>(i)];
        return acc;
    }

    // RK4 step with the input known at t, t + dt/2 and t + dt
    void step(Vec& x, double dt, double u0, double um, double u1) const {
        auto axpy = [](const Vec& a, double s, const Vec& b) {
            Vec out(a.size());
            for (size_t i = 0; i < a.size(); ++i) out[i] = a[i] + s * b[i];
            return out;
        };
        const Vec k1 = deriv(x, u0);
        const Vec k2 = deriv(axpy(x, dt / 2.0, k1), um);
        const Vec k3 = deriv(axpy(x, dt / 2.0, k2), um);
        const Vec k4 = deriv(axpy(x, dt, k3), u1);
        for (size_t i = 0; i < x.size(); ++i) x[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
};

struct Grid {
    double dt;
    int delay_samples;
    int steps;
};

Grid make_grid(double t_final, double dt, double delay) {
    if (!(t_final > 0.0)) throw Error("t_final must be > 0");
    if (!(dt > 0.0)) throw Error("dt must be > 0");
    Grid g{dt, 0, 0};
    if (delay > 0.0) {
        if (dt > delay / 10.0 * (1.0 + 1e-12)) throw Error("dt must be <= delay/10");
        g.delay_samples = static_cast<int>(std::ceil(delay / dt - 1e-9));
        g.dt = delay / g.delay_samples;
    }
    g.steps = static_cast<int>(std::llround(t_final / g.dt));
    return g;
}

// history value at fractional index j + 0.5; samples before 0 are zero
double midpoint(const Vec& z, int j) {
    if (j < 0) return 0.0;
    const auto at = [&](int i) { return z[static_cast<size_t>(i)]; };
    if (j == 0) return 0.375 * at(0) + 0.75 * at(1) - 0.125 * at(2);
    return (-at(j - 1) + 9.0 * at(j) + 9.0 * at(j + 1) - at(j + 2)) / 16.0;
}

void guard(StepSeries& s, double y) {
    if (!std::isfinite(y) || std::abs(y) > 1e9) throw SimulationDiverged(std::move(s));
}

} // namespace

StepSeries step_response(const TransferFunction& open_loop, double t_final, double dt) {
    const StateSpace ss = tf_to_statespace(open_loop);
    const Grid grid = make_grid(t_final, dt, open_loop.delay());
    const Integrator in{ss};

    StepSeries out;
    out.dt = grid.dt;
    out.t.reserve(static_cast<size_t>(grid.steps) + 1);
    out.y.reserve(static_cast<size_t>(grid.steps) + 1);
    Vec x(static_cast<size_t>(ss.n), 0.0);

    if (grid.delay_samples == 0) {
        if (1.0 + ss.D == 0.0) throw Error("singular algebraic loop");
        // e = (1 - Cx)/(1 + D) eliminates the direct feedthrough loop
        auto err = [&](const Vec& s) { return (1.0 - in.output(s, 0.0)) / (1.0 + ss.D); };
        for (int k = 0; k <= grid.steps; ++k) {
            const double y = 1.0 - err(x);
            out.t.push_back(k * grid.dt);
            out.y.push_back(y);
            guard(out, y);
            if (k == grid.steps) break;
            const double h = grid.dt;
            const Vec k1 = in.deriv(x, err(x));
            Vec x2 = x, x3 = x, x4 = x;
            for (size_t i = 0; i < x.size(); ++i) x2[i] += h / 2.0 * k1[i];
            const Vec k2 = in.deriv(x2, err(x2));
            for (size_t i = 0; i < x.size(); ++i) x3[i] += h / 2.0 * k2[i];
            const Vec k3 = in.deriv(x3, err(x3));
            for (size_t i = 0; i < x.size(); ++i) x4[i] += h * k3[i];
            const Vec k4 = in.deriv(x4, err(x4));
            for (size_t i = 0; i < x.size(); ++i) x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        return out;
    }

    const int nd = grid.delay_samples;
    Vec z(static_cast<size_t>(grid.steps) + 1, 0.0);  // undelayed loop output history
    auto delayed = [&](int j) { return j < 0 ? 0.0 : z[static_cast<size_t>(j)]; };
    for (int k = 0; k <= grid.steps; ++k) {
        const int j = k - nd;
        const double y = delayed(j);
        out.t.push_back(k * grid.dt);
        out.y.push_back(y);
        guard(out, y);
        const double e0 = 1.0 - y;
        z[static_cast<size_t>(k)] = in.output(x, e0);
        if (k == grid.steps) break;
        const double em = 1.0 - midpoint(z, j);
        const double e1 = 1.0 - delayed(j + 1);
        in.step(x, grid.dt, e0, em, e1);
    }
    return out;
}

StepSeries open_loop_step(const TransferFunction& g, double t_final, double dt) {
    const StateSpace ss = tf_to_statespace(g);
    const Grid grid = make_grid(t_final, dt, g.delay());
    const Integrator in{ss};
    StepSeries out;
    out.dt = grid.dt;
    Vec x(static_cast<size_t>(ss.n), 0.0);
    Vec z(static_cast<size_t>(grid.steps) + 1, 0.0);
    for (int k = 0; k <= grid.steps; ++k) {
        z[static_cast<size_t>(k)] = in.output(x, 1.0);
        const int j = k - grid.delay_samples;
        const double y = j < 0 ? 0.0 : z[static_cast<size_t>(j)];
        out.t.push_back(k * grid.dt);
        out.y.push_back(y);
        guard(out, y);
        if (k == grid.steps) break;
        in.step(x, grid.dt, 1.0, 1.0, 1.0);
    }
    return out;
}

OvershootReport overshoot(const StepSeries& s, double tail_fraction) {
    if (s.y.empty()) throw Error("empty series");
    if (!(tail_fraction > 0.0 && tail_fraction < 1.0)) throw Error("tail fraction must lie in (0,1)");
    const size_t n = s.y.size();
    const size_t m = std::max<size_t>(2, static_cast<size_t>(std::floor(tail_fraction * static_cast<double>(n))));
    const size_t start = n > m ? n - m : 0;
    const size_t half = start + (n - start) / 2;
    auto mean = [&](size_t a, size_t b) {
        return std::accumulate(s.y.begin() + static_cast<long>(a), s.y.begin() + static_cast<long>(b), 0.0) /
               static_cast<double>(std::max<size_t>(1, b - a));
    };

    OvershootReport r;
    r.final_value = mean(start, n);
    const double scale = std::abs(r.final_value);
    const double drift = n - start >= 2 ? std::abs(mean(start, half) - mean(half, n)) : 0.0;
    r.settled = scale > 0.0 ? drift < 0.01 * scale : drift == 0.0;

    const auto peak = std::max_element(s.y.begin(), s.y.end());
    const size_t ip = static_cast<size_t>(peak - s.y.begin());
    r.peak_time = s.t.empty() ? 0.0 : s.t[ip];
    const bool rising_to_end = s.y.back() >= *peak;
    r.overshoot_pct =
        scale > 0.0 && !rising_to_end ? std::max(0.0, 100.0 * (*peak - r.final_value) / scale) : 0.0;

    if (r.settled) {
        std::optional<size_t> last_out;
        for (size_t i = 0; i < n; ++i)
            if (std::abs(s.y[i] - r.final_value) > 0.02 * scale) last_out = i;
        if (!last_out) r.settling_time_2pct = s.t.front();
        else if (*last_out + 1 < n) r.settling_time_2pct = s.t[*last_out + 1];
    }
    return r;
}

IsoDampingReport iso_damping_report(const TransferFunction& plant, const TransferFunction& controller,
                                    const TransferFunction& shaper, const std::vector<double>& gain_multipliers,
                                    double t_final, double dt, double threshold_pct, double tail_fraction) {
    for (double m : gain_multipliers)
        if (!(m > 0.0)) throw Error("gain multipliers must be > 0");
    const TransferFunction loop = series({shaper, controller, plant});
    std::vector<double> order = gain_multipliers;
    std::stable_sort(order.begin(), order.end());

    std::vector<std::future<IsoDampingRun>> jobs;
    for (double m : order) {
        jobs.push_back(std::async(std::launch::async, [&, m] {
            IsoDampingRun run;
            run.multiplier = m;
            try {
                run.series = step_response(loop.scaled(m), t_final, dt);
                run.series.gain_label = m;
                run.report = overshoot(run.series, tail_fraction);
            } catch (const SimulationDiverged& e) {
                run.series = e.partial();
                run.series.gain_label = m;
                run.diverged = true;
            }
            return run;
        }));
    }

    IsoDampingReport r;
    r.threshold_pct = threshold_pct;
    double lo = 0.0, hi = 0.0;
    bool any = false;
    for (auto& j : jobs) {
        IsoDampingRun run = j.get();
        if (run.diverged) {
            r.any_diverged = true;
        } else {
            const double o = run.report->overshoot_pct;
            lo = any ? std::min(lo, o) : o;
            hi = any ? std::max(hi, o) : o;
            any = true;
        }
        r.runs.push_back(std::move(run));
    }
    if (any) r.spread_pct = hi - lo;
    r.pass = any && !r.any_diverged && *r.spread_pct <= threshold_pct;
    return r;
}

} // namespace isodamp
