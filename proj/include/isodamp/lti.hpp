#pragma once

#include <complex>
#include <optional>
#include <span>
#include <vector>

#include "isodamp/poly.hpp"

namespace isodamp {

/// Continuous SISO transfer function num(s)/den(s)·exp(-delay·s).
///
/// Plants, PID controllers and phase-shaping stages all live in this one
/// type. Products are expanded without pole-zero cancellation.
class TransferFunction {
public:
    TransferFunction();
    TransferFunction(Polynomial num, Polynomial den, double delay = 0.0);

    static TransferFunction gain(double k);

    const Polynomial& num() const noexcept { return num_; }
    const Polynomial& den() const noexcept { return den_; }
    double delay() const noexcept { return delay_; }

    bool is_proper() const noexcept { return num_.degree() <= den_.degree(); }
    TransferFunction without_delay() const { return {num_, den_, 0.0}; }
    TransferFunction scaled(double k) const { return {k * num_, den_, delay_}; }

private:
    Polynomial num_;
    Polynomial den_;
    double delay_ = 0.0;
};

TransferFunction series(const TransferFunction& a, const TransferFunction& b);
TransferFunction series(std::initializer_list<TransferFunction> parts);

// (kd·s² + kp·s + ki)/s; the PI form when kd = 0, (kd·s + kp)/1 when ki = 0.
TransferFunction pid_tf(double kp, double ki, double kd);

// num(jw)/den(jw)·exp(-jwL)
std::complex<double> freq_response(const TransferFunction& g, double w);

struct MarginReport {
    std::optional<double> gain_crossover_wgc;   // rad/s
    std::optional<double> phase_crossover_wpc;  // rad/s
    std::optional<double> gain_margin;          // ratio 1/|G(jw_pc)|
    std::optional<double> phase_margin;         // degrees, 180 + phase(w_gc)
};

MarginReport margins(const TransferFunction& g, double w_lo, double w_hi, int n_grid);

// Log-spaced grid of n points over [lo, hi] (both ends included).
std::vector<double> log_grid(double lo, double hi, int n);

// Continuous phase in radians at each (increasing) frequency. The rational
// part is unwrapped by nearest-branch continuation starting from its
// low-frequency asymptote; the delay contributes exactly -w·L.
std::vector<double> unwrapped_phase(const TransferFunction& g, std::span<const double> w);
double unwrapped_phase_at(const TransferFunction& g, double w);

// Continuous phase (radians) up to one global 2π offset; cheaper than
// unwrapped_phase when only differences matter.
std::vector<double> relative_phase(const TransferFunction& g, std::span<const double> w);

// d(phase)/dw in rad per rad/s, central difference with relative step h.
double phase_slope(const TransferFunction& g, double w, double h = 1e-5);

enum class GainConvention {
    tableau,  // den + K·num
    literal,  // den + (K/α)·num with α read from the (s+α)/(αs+1) shaper
};

// Closed-loop characteristic polynomial of 1 + K·shaper·controller·plant.
Polynomial char_poly(const TransferFunction& plant, const TransferFunction& controller,
                     const TransferFunction& shaper, double k,
                     GainConvention convention = GainConvention::tableau);

// Diagonal Padé approximant of exp(-delay·s), 1 <= order <= 5. Coefficients
// are in the standard form with unit constant term.
TransferFunction pade(double delay, int order);

// Replace the dead time of g by its Padé approximant (identity when delay is 0).
TransferFunction rationalize(const TransferFunction& g, int order);

} // namespace isodamp
