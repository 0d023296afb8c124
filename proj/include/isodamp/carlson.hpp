#pragma once

#include <string>
#include <utility>
#include <vector>

#include "isodamp/error.hpp"
#include "isodamp/lti.hpp"

namespace isodamp {

enum class StageKind {
    differintegrator,  // s^q ~ (s+α)/(αs+1)
    shifted_sum,       // K(s^q + a) ~ K[(1+aα)s + (a+α)]/(αs+1)
    shifted_pow,       // K(s+a)^q ~ K(s+α+a)/(αs+1+αa)
};

std::string to_string(StageKind kind);
StageKind stage_kind_from_string(const std::string& name);

// Signed order q (q > 0 differentiator, q < 0 integrator) to the Carlson
// ratio α = (1-q)/(1+q). Requires 0 < |q| < 1.
double alpha_from_order(double q);
// Inverse of alpha_from_order: q = (1-α)/(1+α), alpha > 0.
double order_from_alpha(double alpha);

/// One fractional-order element before rational realization.
///
/// q and alpha always agree through alpha_from_order; construct with
/// from_order or from_alpha rather than filling the fields by hand.
/// q = 0 (alpha = 1) is the unity stage.
struct FoStage {
    StageKind kind = StageKind::differintegrator;
    double q = 0.0;
    double a = 0.0;
    double gain_k = 1.0;
    double alpha = 1.0;

    static FoStage from_order(StageKind kind, double q, double a = 0.0, double gain_k = 1.0);
    static FoStage from_alpha(StageKind kind, double alpha, double a = 0.0, double gain_k = 1.0);

    bool is_unity() const noexcept { return alpha == 1.0 && a == 0.0 && gain_k == 1.0; }
};

TransferFunction realize_first_order(const FoStage& stage);

// Phase-extremum frequency of a shifted stage (rad/s).
double peak_frequency(const FoStage& stage);

// Phase change (degrees) of a shifted_pow stage about w_r; negative for
// alpha > 1.
double phase_boost(const FoStage& stage, double w_r);

// Frequency band over which the first-order stage acts as s^q:
// [min(α,1/α), max(α,1/α)] for the plain stage, [1/α, (α+a)/(1+αa)] (sorted)
// for shifted_sum and the zero/pole span for shifted_pow.
std::pair<double, double> validity_band(const FoStage& stage);

// Iterates H_i = H_{i-1}·[(p-m)H² + (p+m)G]/[(p+m)H² + (p-m)G] from H_0 = 1,
// expanding every product and normalizing by the denominator's leading
// coefficient after each step. Requires p > m >= 1 and 1 <= iterations <= 6.
TransferFunction carlson_iterate(const Polynomial& g_num, const Polynomial& g_den, int p, int m,
                                 int iterations);

namespace detail {

template <class Real>
std::vector<Real> mul(const std::vector<Real>& a, const std::vector<Real>& b) {
    std::vector<Real> out(a.size() + b.size() - 1, Real(0));
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    return out;
}

template <class Real>
std::vector<Real> axpby(Real x, const std::vector<Real>& a, Real y, const std::vector<Real>& b) {
    const size_t n = std::max(a.size(), b.size());
    std::vector<Real> out(n, Real(0));
    for (size_t i = 0; i < a.size(); ++i) out[n - a.size() + i] += x * a[i];
    for (size_t i = 0; i < b.size(); ++i) out[n - b.size() + i] += y * b[i];
    return out;
}

} // namespace detail

/// Coefficient-level Carlson iteration in an arbitrary real type; the
/// double instantiation backs carlson_iterate. Returns descending numerator
/// and denominator coefficients (no normalization of leading zeros).
template <class Real>
std::pair<std::vector<Real>, std::vector<Real>> carlson_iterate_coeffs(const std::vector<Real>& g_num,
                                                                       const std::vector<Real>& g_den,
                                                                       int p, int m, int iterations) {
    if (!(p > m && m >= 1)) throw Error("carlson requires p > m >= 1");
    if (iterations < 1 || iterations > 6) throw Error("carlson iterations out of range");
    const Real lo = Real(p - m);
    const Real hi = Real(p + m);
    std::vector<Real> n{Real(1)}, d{Real(1)};
    for (int i = 0; i < iterations; ++i) {
        const auto n2g = detail::mul(detail::mul(n, n), g_den);
        const auto gd2 = detail::mul(g_num, detail::mul(d, d));
        auto next_n = detail::mul(n, detail::axpby(lo, n2g, hi, gd2));
        auto next_d = detail::mul(d, detail::axpby(hi, n2g, lo, gd2));
        size_t lead = 0;
        while (lead < next_d.size() && next_d[lead] == Real(0)) ++lead;
        if (lead == next_d.size()) throw Error("carlson iteration produced a zero denominator");
        const Real scale = next_d[lead];
        for (auto& c : next_n) c /= scale;
        for (auto& c : next_d) c /= scale;
        n = std::move(next_n);
        d = std::move(next_d);
    }
    return {std::move(n), std::move(d)};
}

} // namespace isodamp
