#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "isodamp/poly.hpp"

namespace isodamp {

struct RouthTable {
    std::vector<std::vector<double>> rows;  // s^n first, s^0 last
    std::vector<double> first_column;
    int sign_changes = 0;
    int epsilon_substitutions = 0;  // zero-pivot and all-zero-row patches
};

// Zero pivots are replaced by 1e-9·max|coeff|; an all-zero row is replaced
// by the derivative of the auxiliary polynomial formed from the row above.
RouthTable routh_table(const Polynomial& p);

// Strictly Hurwitz: no sign change and no patch applied.
bool is_hurwitz(const Polynomial& p);

struct MarginalGainResult {
    enum class Kind { finite, unbounded, zero };
    Kind kind = Kind::finite;
    double k_m = 0.0;  // meaningful for Kind::finite
    std::optional<bool> stable_at_k;
    std::optional<double> stability_ratio;
};

using PolynomialOfGain = std::function<Polynomial(double)>;

// Bisection on is_hurwitz(poly_of_k(K)) over [k_lo, k_hi] to 1e-9 relative.
// A 32-point log pre-scan rejects brackets with more than one transition.
// k_query, when given, fills stable_at_k and the stability ratio.
MarginalGainResult marginal_gain(const PolynomialOfGain& poly_of_k, double k_lo, double k_hi,
                                 std::optional<double> k_query = std::nullopt);

// SR = K_m / K
double stability_ratio(double k_m, double k);

// w_gc ~ w_pc·sqrt(K/K_m)
double estimate_gain_crossover(double w_pc, double k, double k_m);

} // namespace isodamp
