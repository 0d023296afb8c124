#include "isodamp/routh.hpp"

#include <algorithm>
#include <cmath>

#include "isodamp/error.hpp"
#include "isodamp/lti.hpp"

namespace isodamp {

namespace {

constexpr double kZeroTolerance = 1e-12;

double max_abs(const std::vector<double>& row) {
    double m = 0.0;
    for (double v : row) m = std::max(m, std::abs(v));
    return m;
}

bool all_zero(const std::vector<double>& row, double scale) {
    return std::all_of(row.begin(), row.end(),
                       [&](double v) { return std::abs(v) <= kZeroTolerance * scale; });
}

} // namespace

RouthTable routh_table(const Polynomial& p) {
    if (p.is_zero()) throw Error("zero polynomial");
    const int n = p.degree();
    if (n < 1) throw Error("routh table needs degree >= 1");
    const double epsilon = 1e-9 * p.max_abs_coeff();
    const auto& c = p.coeffs();
    const size_t width = static_cast<size_t>(n / 2 + 1);

    RouthTable t;
    t.rows.assign(static_cast<size_t>(n) + 1, std::vector<double>(width, 0.0));
    for (size_t k = 0; k < c.size(); ++k) t.rows[k % 2][k / 2] = c[k];
    std::vector<double> scale(static_cast<size_t>(n) + 1, p.max_abs_coeff());

    // Patch row i in place before it is used as a pivot row.
    auto patch = [&](size_t i) {
        auto& row = t.rows[i];
        if (all_zero(row, scale[i])) {
            // auxiliary polynomial from row i-1, power P = n - (i - 1)
            const int power = n - static_cast<int>(i) + 1;
            const auto& above = t.rows[i - 1];
            for (size_t j = 0; j < width; ++j) {
                const int pw = power - 2 * static_cast<int>(j);
                row[j] = pw > 0 ? above[j] * pw : 0.0;
            }
            ++t.epsilon_substitutions;
            scale[i] = std::max(scale[i], max_abs(row));
        }
        if (std::abs(row[0]) <= kZeroTolerance * scale[i]) {
            row[0] = epsilon;
            ++t.epsilon_substitutions;
        }
    };

    for (size_t i = 2; i <= static_cast<size_t>(n); ++i) {
        patch(i - 1);
        const auto& a = t.rows[i - 2];
        const auto& b = t.rows[i - 1];
        auto& out = t.rows[i];
        for (size_t j = 0; j + 1 < width; ++j) out[j] = (b[0] * a[j + 1] - a[0] * b[j + 1]) / b[0];
        scale[i] = std::max(max_abs(a), max_abs(b));
    }
    patch(static_cast<size_t>(n));

    t.first_column.reserve(t.rows.size());
    for (const auto& row : t.rows) t.first_column.push_back(row[0]);
    for (size_t i = 1; i < t.first_column.size(); ++i)
        if ((t.first_column[i] > 0.0) != (t.first_column[i - 1] > 0.0)) ++t.sign_changes;
    return t;
}

bool is_hurwitz(const Polynomial& p) {
    const RouthTable t = routh_table(p);
    return t.sign_changes == 0 && t.epsilon_substitutions == 0;
}

MarginalGainResult marginal_gain(const PolynomialOfGain& poly_of_k, double k_lo, double k_hi,
                                 std::optional<double> k_query) {
    if (!(k_lo > 0.0 && k_lo < k_hi)) throw Error("marginal gain bracket must satisfy 0 < k_lo < k_hi");
    auto stable = [&](double k) { return is_hurwitz(poly_of_k(k)); };

    const std::vector<double> ks = log_grid(k_lo, k_hi, 32);
    std::vector<bool> ok(ks.size());
    for (size_t i = 0; i < ks.size(); ++i) ok[i] = stable(ks[i]);

    MarginalGainResult r;
    if (!ok[0]) {
        r.kind = MarginalGainResult::Kind::zero;
    } else {
        int transitions = 0;
        size_t first = ks.size();
        for (size_t i = 1; i < ks.size(); ++i) {
            if (ok[i] != ok[i - 1]) {
                ++transitions;
                if (first == ks.size()) first = i - 1;
            }
        }
        if (transitions > 1) throw Error("multiple stability transitions");
        if (transitions == 0) {
            r.kind = MarginalGainResult::Kind::unbounded;
        } else {
            double lo = ks[first];
            double hi = ks[first + 1];
            while ((hi - lo) > 1e-9 * lo) {
                const double mid = std::sqrt(lo * hi);
                (stable(mid) ? lo : hi) = mid;
            }
            r.kind = MarginalGainResult::Kind::finite;
            r.k_m = std::sqrt(lo * hi);
        }
    }
    if (k_query) {
        r.stable_at_k = stable(*k_query);
        if (r.kind == MarginalGainResult::Kind::finite && *k_query > 0.0)
            r.stability_ratio = stability_ratio(r.k_m, *k_query);
    }
    return r;
}

double stability_ratio(double k_m, double k) {
    if (!(k > 0.0) || !(k_m > 0.0) || !std::isfinite(k_m)) throw Error("stability ratio needs positive gains");
    return k_m / k;
}

double estimate_gain_crossover(double w_pc, double k, double k_m) {
    if (!(w_pc > 0.0 && k > 0.0 && k_m > 0.0)) throw Error("crossover estimate needs positive inputs");
    if (k > k_m) throw Error("estimate undefined above marginal gain");
    return w_pc * std::sqrt(k / k_m);
}

} // namespace isodamp
