#include "isodamp/lti.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "isodamp/error.hpp"

namespace isodamp {

namespace {

constexpr double kPi = std::numbers::pi;

// Lowest power carrying a nonzero coefficient, and that coefficient.
std::pair<int, double> lowest_term(const Polynomial& p) {
    for (int k = 0; k <= p.degree(); ++k) {
        const double c = p.coefficient(k);
        if (c != 0.0) return {k, c};
    }
    return {0, 0.0};
}

// Lower bound on the magnitude of every nonzero root of p.
double root_magnitude_floor(const Polynomial& p) {
    auto [k, a0] = lowest_term(p);
    double rest = 0.0;
    for (int i = k + 1; i <= p.degree(); ++i) rest = std::max(rest, std::abs(p.coefficient(i)));
    if (rest == 0.0) return std::numeric_limits<double>::infinity();
    return std::abs(a0) / (std::abs(a0) + rest);
}

double rational_arg(const TransferFunction& g, double w) {
    const std::complex<double> jw{0.0, w};
    return std::arg(g.num()(jw) / g.den()(jw));
}

// Carry the rational-part phase from (w_from, phase_from) to w_to, bisecting
// (in log frequency) whenever one step would turn by more than pi/4.
double continue_phase(const TransferFunction& g, double w_from, double phase_from, double w_to,
                      int depth = 0) {
    const double raw = rational_arg(g, w_to);
    if (!std::isfinite(raw) || !std::isfinite(phase_from)) return raw + phase_from;
    const double delta = std::remainder(raw - phase_from, 2.0 * kPi);
    if (std::abs(delta) <= kPi / 4.0 || depth > 40) return phase_from + delta;
    const double mid = std::sqrt(w_from * w_to);
    const double phase_mid = continue_phase(g, w_from, phase_from, mid, depth + 1);
    return continue_phase(g, mid, phase_mid, w_to, depth + 1);
}

// Rational-part phase at w_start, anchored to the low-frequency asymptote.
double anchored_rational_phase(const TransferFunction& g, double w_start) {
    const auto [kn, cn] = lowest_term(g.num());
    const auto [kd, cd] = lowest_term(g.den());
    const double asymptote = (cn / cd < 0.0 ? kPi : 0.0) + (kn - kd) * kPi / 2.0;
    const double floor = std::min(root_magnitude_floor(g.num()), root_magnitude_floor(g.den()));
    double w0 = std::isfinite(floor) ? std::min(w_start, 1e-3 * floor) : w_start;
    if (w0 <= 0.0) w0 = w_start;
    double phase = asymptote + std::remainder(rational_arg(g, w0) - asymptote, 2.0 * kPi);
    if (w0 >= w_start) return phase;
    const double decades = std::log10(w_start / w0);
    const int steps = std::max(2, static_cast<int>(std::ceil(decades * 200.0)));
    double w_prev = w0;
    for (int i = 1; i <= steps; ++i) {
        const double w = i == steps ? w_start : w0 * std::pow(10.0, decades * i / steps);
        phase = continue_phase(g, w_prev, phase, w);
        w_prev = w;
    }
    return phase;
}

std::vector<double> rational_phase(const TransferFunction& g, std::span<const double> w) {
    std::vector<double> out(w.size());
    if (w.empty()) return out;
    out[0] = anchored_rational_phase(g, w[0]);
    for (size_t i = 1; i < w.size(); ++i) out[i] = continue_phase(g, w[i - 1], out[i - 1], w[i]);
    return out;
}

template <class F>
double bisect_log(F&& f, double lo, double hi, double f_lo) {
    while ((hi - lo) > 1e-9 * lo) {
        const double mid = std::sqrt(lo * hi);
        const double f_mid = f(mid);
        if ((f_mid > 0.0) == (f_lo > 0.0)) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    return std::sqrt(lo * hi);
}

} // namespace

TransferFunction::TransferFunction() : num_{1.0}, den_{1.0} {}

TransferFunction::TransferFunction(Polynomial num, Polynomial den, double delay)
    : num_(std::move(num)), den_(std::move(den)), delay_(delay) {
    if (den_.is_zero()) throw Error("zero denominator");
    if (!(delay_ >= 0.0) || !std::isfinite(delay_)) throw Error("delay must be >= 0");
}

TransferFunction TransferFunction::gain(double k) { return {Polynomial{k}, Polynomial{1.0}}; }

TransferFunction series(const TransferFunction& a, const TransferFunction& b) {
    return {a.num() * b.num(), a.den() * b.den(), a.delay() + b.delay()};
}

TransferFunction series(std::initializer_list<TransferFunction> parts) {
    TransferFunction out;
    for (const auto& p : parts) out = series(out, p);
    return out;
}

TransferFunction pid_tf(double kp, double ki, double kd) {
    if (kp == 0.0 && ki == 0.0 && kd == 0.0) throw Error("empty controller");
    if (ki == 0.0) return {Polynomial{kd, kp}, Polynomial{1.0}};
    return {Polynomial{kd, kp, ki}, Polynomial{1.0, 0.0}};
}

std::complex<double> freq_response(const TransferFunction& g, double w) {
    const std::complex<double> jw{0.0, w};
    const std::complex<double> d = g.den()(jw);
    if (std::abs(d) < 1e-300) throw Error("pole on frequency axis");
    std::complex<double> out = g.num()(jw) / d;
    if (g.delay() > 0.0) out *= std::polar(1.0, -w * g.delay());
    return out;
}

std::vector<double> log_grid(double lo, double hi, int n) {
    std::vector<double> w(static_cast<size_t>(std::max(n, 1)));
    if (n == 1) {
        w[0] = lo;
        return w;
    }
    const double a = std::log10(lo);
    const double b = std::log10(hi);
    for (int i = 0; i < n; ++i) w[static_cast<size_t>(i)] = std::pow(10.0, a + (b - a) * i / (n - 1));
    w.front() = lo;
    w.back() = hi;
    return w;
}

std::vector<double> unwrapped_phase(const TransferFunction& g, std::span<const double> w) {
    std::vector<double> out = rational_phase(g, w);
    for (size_t i = 0; i < w.size(); ++i) out[i] -= w[i] * g.delay();
    return out;
}

std::vector<double> relative_phase(const TransferFunction& g, std::span<const double> w) {
    std::vector<double> out(w.size());
    if (w.empty()) return out;
    out[0] = rational_arg(g, w[0]);
    for (size_t i = 1; i < w.size(); ++i) out[i] = continue_phase(g, w[i - 1], out[i - 1], w[i]);
    for (size_t i = 0; i < w.size(); ++i) out[i] -= w[i] * g.delay();
    return out;
}

double unwrapped_phase_at(const TransferFunction& g, double w) {
    return anchored_rational_phase(g, w) - w * g.delay();
}

double phase_slope(const TransferFunction& g, double w, double h) {
    const double w_hi = w * (1.0 + h);
    const double w_lo = w * (1.0 - h);
    const std::complex<double> jh{0.0, w_hi};
    const std::complex<double> jl{0.0, w_lo};
    const std::complex<double> ratio = (g.num()(jh) * g.den()(jl)) / (g.den()(jh) * g.num()(jl));
    return std::arg(ratio) / (w_hi - w_lo) - g.delay();
}

MarginReport margins(const TransferFunction& g, double w_lo, double w_hi, int n_grid) {
    if (!(w_lo > 0.0 && w_lo < w_hi) || n_grid < 2) throw Error("invalid margin band");
    const std::vector<double> w = log_grid(w_lo, w_hi, n_grid);
    const std::vector<double> rphase = rational_phase(g, w);

    auto mag_excess = [&](double x) { return std::log(std::abs(freq_response(g, x))); };
    // phase + 180 deg on the continuous branch, continued from grid point i
    auto phase_excess_from = [&](size_t i) {
        return [&, i](double x) { return continue_phase(g, w[i], rphase[i], x) - x * g.delay() + kPi; };
    };

    MarginReport r;
    for (size_t i = 0; i + 1 < w.size() && !r.gain_crossover_wgc; ++i) {
        const double a = mag_excess(w[i]);
        const double b = mag_excess(w[i + 1]);
        if (a == 0.0) {
            r.gain_crossover_wgc = w[i];
        } else if ((a > 0.0) != (b > 0.0)) {
            r.gain_crossover_wgc = bisect_log(mag_excess, w[i], w[i + 1], a);
        } else if (b == 0.0) {
            r.gain_crossover_wgc = w[i + 1];
        }
        if (r.gain_crossover_wgc) {
            const double wc = *r.gain_crossover_wgc;
            r.phase_margin = (phase_excess_from(i)(wc)) * 180.0 / kPi;
        }
    }
    for (size_t i = 0; i + 1 < w.size() && !r.phase_crossover_wpc; ++i) {
        auto f = phase_excess_from(i);
        const double a = rphase[i] - w[i] * g.delay() + kPi;
        const double b = rphase[i + 1] - w[i + 1] * g.delay() + kPi;
        if (a == 0.0) {
            r.phase_crossover_wpc = w[i];
        } else if ((a > 0.0) != (b > 0.0)) {
            r.phase_crossover_wpc = bisect_log(f, w[i], w[i + 1], a);
        } else if (b == 0.0) {
            r.phase_crossover_wpc = w[i + 1];
        }
        if (r.phase_crossover_wpc) r.gain_margin = 1.0 / std::abs(freq_response(g, *r.phase_crossover_wpc));
    }
    return r;
}

Polynomial char_poly(const TransferFunction& plant, const TransferFunction& controller,
                     const TransferFunction& shaper, double k, GainConvention convention) {
    if (plant.delay() > 0.0 || controller.delay() > 0.0 || shaper.delay() > 0.0)
        throw Error("rationalize delay first");
    const TransferFunction loop = series({shaper, controller, plant});
    double scale = k;
    if (convention == GainConvention::literal) {
        const double alpha = shaper.den().leading() / shaper.num().leading();
        scale = k / alpha;
    }
    return loop.den() + scale * loop.num();
}

TransferFunction pade(double delay, int order) {
    if (!(delay > 0.0)) throw Error("pade delay must be > 0");
    if (order < 1 || order > 5) throw Error("pade order out of range");
    // c_k = (2n-k)! n! / ((2n)! k! (n-k)!)
    auto fact = [](int n) {
        double f = 1.0;
        for (int i = 2; i <= n; ++i) f *= i;
        return f;
    };
    const int n = order;
    std::vector<double> num(static_cast<size_t>(n) + 1), den(static_cast<size_t>(n) + 1);
    for (int k = 0; k <= n; ++k) {
        const double c = fact(2 * n - k) * fact(n) / (fact(2 * n) * fact(k) * fact(n - k));
        const double lk = std::pow(delay, k);
        // descending storage: power k sits at index n - k
        den[static_cast<size_t>(n - k)] = c * lk;
        num[static_cast<size_t>(n - k)] = c * lk * (k % 2 == 0 ? 1.0 : -1.0);
    }
    return {Polynomial(std::move(num)), Polynomial(std::move(den))};
}

TransferFunction rationalize(const TransferFunction& g, int order) {
    if (g.delay() == 0.0) return g;
    return series(g.without_delay(), pade(g.delay(), order));
}

} // namespace isodamp
