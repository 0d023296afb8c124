#include "isodamp/carlson.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace isodamp {

std::string to_string(StageKind kind) {
    switch (kind) {
    case StageKind::differintegrator: return "differintegrator";
    case StageKind::shifted_sum: return "shifted_sum";
    case StageKind::shifted_pow: return "shifted_pow";
    }
    return "unknown";
}

StageKind stage_kind_from_string(const std::string& name) {
    if (name == "differintegrator") return StageKind::differintegrator;
    if (name == "shifted_sum") return StageKind::shifted_sum;
    if (name == "shifted_pow") return StageKind::shifted_pow;
    throw Error("unknown stage kind '" + name + "'");
}

double alpha_from_order(double q) {
    if (!(std::abs(q) < 1.0) || q == 0.0) throw Error("order must satisfy 0 < |q| < 1");
    return (1.0 - q) / (1.0 + q);
}

double order_from_alpha(double alpha) {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw Error("alpha must be > 0");
    return (1.0 - alpha) / (1.0 + alpha);
}

namespace {

void check_shift(StageKind kind, double a, double gain_k) {
    if (!(a >= 0.0)) throw Error("shift a must be >= 0");
    if (!(gain_k > 0.0)) throw Error("stage gain must be > 0");
    if (kind == StageKind::differintegrator && a != 0.0)
        throw Error("differintegrator stage takes no shift");
}

// shifted_pow with a = 0 is the plain stage
StageKind canonical_kind(StageKind kind, double a) {
    return kind == StageKind::shifted_pow && a == 0.0 ? StageKind::differintegrator : kind;
}

} // namespace

FoStage FoStage::from_order(StageKind kind, double q, double a, double gain_k) {
    check_shift(kind, a, gain_k);
    if (!(std::abs(q) < 1.0)) throw Error("order must satisfy |q| < 1");
    FoStage s;
    s.kind = canonical_kind(kind, a);
    s.q = q;
    s.alpha = q == 0.0 ? 1.0 : alpha_from_order(q);
    s.a = a;
    s.gain_k = gain_k;
    return s;
}

FoStage FoStage::from_alpha(StageKind kind, double alpha, double a, double gain_k) {
    check_shift(kind, a, gain_k);
    FoStage s;
    s.kind = canonical_kind(kind, a);
    s.q = order_from_alpha(alpha);
    s.alpha = alpha;
    s.a = a;
    s.gain_k = gain_k;
    return s;
}

TransferFunction realize_first_order(const FoStage& st) {
    const double al = st.alpha;
    const double a = st.a;
    const double k = st.gain_k;
    switch (st.kind) {
    case StageKind::differintegrator:
        return {Polynomial{k, k * al}, Polynomial{al, 1.0}};
    case StageKind::shifted_sum:
        return {Polynomial{k * (1.0 + a * al), k * (a + al)}, Polynomial{al, 1.0}};
    case StageKind::shifted_pow:
        return {Polynomial{k, k * (al + a)}, Polynomial{al, 1.0 + al * a}};
    }
    throw Error("unknown stage kind");
}

double peak_frequency(const FoStage& st) {
    const double al = st.alpha;
    const double a = st.a;
    switch (st.kind) {
    case StageKind::shifted_sum: return std::sqrt((al + a) / (al * (1.0 + al * a)));
    case StageKind::shifted_pow: return std::sqrt((al + a) * (1.0 + al * a) / al);
    default: throw Error("peak frequency needs a shifted stage");
    }
}

double phase_boost(const FoStage& st, double w_r) {
    const double al = st.alpha;
    return std::atan((1.0 - al * al) / (2.0 * al * w_r)) * 180.0 / std::numbers::pi;
}

std::pair<double, double> validity_band(const FoStage& st) {
    const double al = st.alpha;
    const double a = st.a;
    auto sorted = [](double x, double y) { return std::pair{std::min(x, y), std::max(x, y)}; };
    switch (st.kind) {
    case StageKind::differintegrator: return sorted(al, 1.0 / al);
    case StageKind::shifted_sum: return sorted(1.0 / al, (al + a) / (1.0 + al * a));
    case StageKind::shifted_pow: return sorted(al + a, 1.0 / al + a);
    }
    return {0.0, 0.0};
}

TransferFunction carlson_iterate(const Polynomial& g_num, const Polynomial& g_den, int p, int m,
                                 int iterations) {
    if (g_num.is_zero()) throw Error("carlson target must be nonzero");
    auto [n, d] = carlson_iterate_coeffs<double>(g_num.coeffs(), g_den.coeffs(), p, m, iterations);
    Polynomial den(std::move(d));
    if (den.is_zero()) throw Error("carlson iteration produced a zero denominator");
    return {Polynomial(std::move(n)), std::move(den)};
}

} // namespace isodamp
