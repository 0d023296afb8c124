#include <doctest.h>

#include <cmath>
#include <complex>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "isodamp/carlson.hpp"

using namespace isodamp;
using doctest::Approx;

namespace {

double stage_phase(const TransferFunction& g, double w) { return std::arg(freq_response(g, w)); }

// frequency of the phase extremum by golden-section search over log w
double numeric_extremum(const TransferFunction& g) {
    const double sign = stage_phase(g, 1.0) >= 0.0 ? 1.0 : -1.0;
    double lo = std::log(1e-4), hi = std::log(1e4);
    const double r = (std::sqrt(5.0) - 1.0) / 2.0;
    for (int i = 0; i < 200; ++i) {
        const double a = hi - r * (hi - lo);
        const double b = lo + r * (hi - lo);
        if (sign * stage_phase(g, std::exp(a)) > sign * stage_phase(g, std::exp(b))) hi = b;
        else lo = a;
    }
    return std::exp(0.5 * (lo + hi));
}

} // namespace

TEST_CASE("alpha_from_order") {
    CHECK(alpha_from_order(1.0 / 3.0) == Approx(0.5).epsilon(1e-15));
    CHECK(alpha_from_order(-0.5) == Approx(3.0).epsilon(1e-15));
    CHECK(alpha_from_order(1e-9) == Approx(1.0).epsilon(1e-8));
    CHECK_THROWS_AS(alpha_from_order(0.0), Error);
    CHECK_THROWS_AS(alpha_from_order(1.0), Error);
    CHECK_THROWS_AS(alpha_from_order(-1.2), Error);
    CHECK_THROWS_AS(order_from_alpha(0.0), Error);
}

TEST_CASE("order round trip") {
    for (int i = 1; i <= 9; ++i) {
        for (double q : {0.1 * i, -0.1 * i}) {
            CHECK(std::abs(order_from_alpha(alpha_from_order(q)) - q) < 1e-12);
            CHECK((alpha_from_order(q) > 1.0) == (q < 0.0));
        }
    }
}

TEST_CASE("stage construction") {
    const FoStage s = FoStage::from_order(StageKind::differintegrator, 0.0);
    CHECK(s.alpha == 1.0);
    CHECK(s.is_unity());
    CHECK(FoStage::from_alpha(StageKind::shifted_pow, 3.0, 0.0).kind == StageKind::differintegrator);
    CHECK_THROWS_AS(FoStage::from_alpha(StageKind::differintegrator, 0.5, 1.0), Error);
    CHECK_THROWS_AS(FoStage::from_alpha(StageKind::shifted_sum, 0.5, -1.0), Error);
    CHECK_THROWS_AS(FoStage::from_alpha(StageKind::shifted_sum, 0.5, 1.0, 0.0), Error);
    CHECK(stage_kind_from_string(to_string(StageKind::shifted_sum)) == StageKind::shifted_sum);
    CHECK_THROWS_AS(stage_kind_from_string("lead"), Error);
}

TEST_CASE("realize_first_order") {
    const auto d = realize_first_order(FoStage::from_alpha(StageKind::differintegrator, 0.5));
    CHECK(d.num() == Polynomial{1.0, 0.5});
    CHECK(d.den() == Polynomial{0.5, 1.0});
    const auto s = realize_first_order(FoStage::from_alpha(StageKind::shifted_sum, 3.0, 1.0));
    CHECK(s.num() == Polynomial{4.0, 4.0});
    CHECK(s.den() == Polynomial{3.0, 1.0});
    const auto p = realize_first_order(FoStage::from_alpha(StageKind::shifted_pow, 3.0, 1.0));
    CHECK(p.num() == Polynomial{1.0, 4.0});
    CHECK(p.den() == Polynomial{3.0, 4.0});
    const auto k = realize_first_order(FoStage::from_alpha(StageKind::shifted_pow, 3.0, 1.0, 2.0));
    CHECK(k.num() == Polynomial{2.0, 8.0});
}

TEST_CASE("plain stage has unit magnitude at one rad/s and the right phase sign") {
    for (double alpha : {0.01, 0.2, 0.5, 0.999, 1.5, 7.0, 300.0}) {
        const auto g = realize_first_order(FoStage::from_alpha(StageKind::differintegrator, alpha));
        CHECK(std::abs(std::abs(freq_response(g, 1.0)) - 1.0) <= 1e-15);
        if (alpha < 1.0) CHECK(stage_phase(g, 1.0) > 0.0);
        else CHECK(stage_phase(g, 1.0) < 0.0);
    }
}

TEST_CASE("peak_frequency examples") {
    CHECK(peak_frequency(FoStage::from_alpha(StageKind::shifted_sum, 2.5, 0.0)) == Approx(1.0));
    CHECK(peak_frequency(FoStage::from_alpha(StageKind::shifted_sum, 3.0, 1.0)) == Approx(std::sqrt(1.0 / 3.0)));
    CHECK(peak_frequency(FoStage::from_alpha(StageKind::shifted_pow, 3.0, 1.0)) == Approx(std::sqrt(16.0 / 3.0)));
    CHECK_THROWS_AS(peak_frequency(FoStage::from_alpha(StageKind::differintegrator, 3.0)), Error);
}

TEST_CASE("peak_frequency matches the numeric phase extremum") {
    for (double alpha : {0.2, 0.5, 2.0, 5.0}) {
        for (double a : {0.0, 0.5, 1.0, 5.0}) {
            for (StageKind kind : {StageKind::shifted_sum, StageKind::shifted_pow}) {
                const FoStage st = FoStage::from_alpha(kind, alpha, a);
                const double numeric = numeric_extremum(realize_first_order(st));
                const double formula = st.kind == StageKind::differintegrator ? 1.0 : peak_frequency(st);
                CHECK(formula == Approx(numeric).epsilon(0.02));
            }
        }
    }
}

TEST_CASE("alternative grouping of the shifted_pow center misses the extremum") {
    // sqrt((α+a)(1+αa))/α differs from the realized extremum whenever α != 1
    const FoStage st = FoStage::from_alpha(StageKind::shifted_pow, 3.0, 1.0);
    const double alt = std::sqrt((3.0 + 1.0) * (1.0 + 3.0)) / 3.0;
    const double numeric = numeric_extremum(realize_first_order(st));
    CHECK(std::abs(alt - numeric) / numeric > 0.4);
}

TEST_CASE("phase_boost") {
    CHECK(phase_boost(FoStage::from_alpha(StageKind::shifted_pow, 1.0, 1.0), 3.0) == Approx(0.0));
    CHECK(phase_boost(FoStage::from_alpha(StageKind::shifted_pow, 3.0, 1.0), std::sqrt(16.0 / 3.0)) ==
          Approx(-30.0).epsilon(1e-12));
    CHECK(phase_boost(FoStage::from_alpha(StageKind::shifted_pow, 1.0 / 3.0, 1.0), 4.0 / std::sqrt(3.0)) ==
          Approx(30.0).epsilon(1e-12));
}

TEST_CASE("validity_band") {
    const auto b = validity_band(FoStage::from_alpha(StageKind::differintegrator, 4.0));
    CHECK(b.first == 0.25);
    CHECK(b.second == 4.0);
    const auto s = validity_band(FoStage::from_alpha(StageKind::shifted_sum, 3.0, 1.0));
    CHECK(s.first == Approx(1.0 / 3.0));
    CHECK(s.second == Approx(1.0));
}

TEST_CASE("carlson_iterate first and second iterates") {
    const Polynomial one{1.0}, s{1.0, 0.0};
    const auto h1 = carlson_iterate(one, s, 2, 1, 1);
    CHECK(h1.num() * Polynomial{3.0, 1.0} == h1.den() * Polynomial{1.0, 3.0});
    CHECK(h1.den().leading() == 1.0);

    const auto h2 = carlson_iterate(one, s, 2, 1, 2);
    const std::vector<double> num{1.0, 36.0, 126.0, 84.0, 9.0};
    const std::vector<double> den{9.0, 84.0, 126.0, 36.0, 1.0};
    REQUIRE(h2.num().degree() == 4);
    REQUIRE(h2.den().degree() == 4);
    for (int k = 0; k <= 4; ++k) {
        CHECK(h2.num().coefficient(4 - k) == Approx(num[static_cast<size_t>(k)] / 9.0).epsilon(1e-15));
        CHECK(h2.den().coefficient(4 - k) == Approx(den[static_cast<size_t>(k)] / 9.0).epsilon(1e-15));
    }
}

TEST_CASE("carlson_iterate fixed point and errors") {
    const auto h = carlson_iterate(Polynomial{1.0}, Polynomial{1.0}, 3, 1, 3);
    CHECK(std::abs(freq_response(h, 0.7) - std::complex<double>(1.0, 0.0)) < 1e-15);
    CHECK_THROWS_AS(carlson_iterate(Polynomial{1.0}, Polynomial{1.0, 0.0}, 1, 1, 1), Error);
    CHECK_THROWS_AS(carlson_iterate(Polynomial{1.0}, Polynomial{1.0, 0.0}, 2, 1, 0), Error);
    CHECK_THROWS_AS(carlson_iterate(Polynomial{1.0}, Polynomial{1.0, 0.0}, 2, 1, 7), Error);
}

TEST_CASE("carlson iterates converge on the positive real axis") {
    using Big = boost::multiprecision::cpp_bin_float_100;
    Big previous = 1;
    for (int i = 1; i <= 4; ++i) {
        const auto [n, d] = carlson_iterate_coeffs<Big>({Big(1)}, {Big(1), Big(0)}, 2, 1, i);
        Big hn = 0, hd = 0;
        for (const auto& c : n) hn = hn * 2 + c;
        for (const auto& c : d) hd = hd * 2 + c;
        const Big h = hn / hd;
        const Big e = abs(h * h - Big(0.5));
        CHECK(e < previous);
        previous = e;
    }
    CHECK(previous > 0);
}
