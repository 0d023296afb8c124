#include <doctest.h>

#include <random>

#include "isodamp/poly.hpp"

using namespace isodamp;
using cd = std::complex<double>;

namespace {

Polynomial random_poly(std::mt19937& rng, int degree) {
    std::uniform_real_distribution<double> c(-10.0, 10.0);
    std::vector<double> v(static_cast<size_t>(degree) + 1);
    for (auto& x : v) x = c(rng);
    if (std::abs(v[0]) < 0.1) v[0] = 1.0;
    return Polynomial(v);
}

} // namespace

TEST_CASE("construction normalizes leading zeros") {
    CHECK(Polynomial{0.0, 0.0, 2.0, 1.0}.coeffs() == std::vector<double>{2.0, 1.0});
    CHECK(Polynomial{0.0, 0.0}.is_zero());
    CHECK(Polynomial{}.degree() == 0);
    CHECK(Polynomial{3.0, 2.0, 1.0}.degree() == 2);
    CHECK(Polynomial::monomial(3, 2.0).coeffs() == std::vector<double>{2.0, 0.0, 0.0, 0.0});
    CHECK(Polynomial{1.0, 2.0, 3.0}.coefficient(0) == 3.0);
    CHECK(Polynomial{1.0, 2.0, 3.0}.coefficient(2) == 1.0);
    CHECK(Polynomial{1.0, 2.0, 3.0}.coefficient(5) == 0.0);
}

TEST_CASE("poly_add") {
    CHECK(poly_add(Polynomial{1.0, 1.0}, Polynomial{1.0, -1.0}) == Polynomial{2.0, 0.0});
    const Polynomial p{3.0, -1.0, 4.0};
    CHECK(poly_add(p, Polynomial{}) == p);
    const Polynomial r = poly_add(Polynomial{1.0, 0.0, 0.0}, Polynomial{-1.0, 0.0, 3.0});
    CHECK(r == Polynomial{3.0});
    CHECK(r.degree() == 0);
    CHECK((p - p).is_zero());
}

TEST_CASE("poly_add is commutative and associative") {
    std::mt19937 rng(7);
    std::uniform_int_distribution<int> deg(0, 8);
    for (int i = 0; i < 200; ++i) {
        const Polynomial a = random_poly(rng, deg(rng));
        const Polynomial b = random_poly(rng, deg(rng));
        const Polynomial c = random_poly(rng, deg(rng));
        CHECK(a + b == b + a);
        const Polynomial l = (a + b) + c;
        const Polynomial r = a + (b + c);
        REQUIRE(l.degree() == r.degree());
        for (int k = 0; k <= l.degree(); ++k)
            CHECK(l.coefficient(k) == doctest::Approx(r.coefficient(k)).epsilon(1e-14));
    }
}

TEST_CASE("poly_mul") {
    CHECK(poly_mul(Polynomial{1.0, 0.5}, Polynomial{0.5, 1.0}) == Polynomial{0.5, 1.25, 0.5});
    const Polynomial p{2.0, -3.0, 1.0};
    CHECK(poly_mul(p, Polynomial{1.0}) == p);
    CHECK(poly_mul(p, Polynomial{}).is_zero());
    CHECK((2.0 * p) == Polynomial{4.0, -6.0, 2.0});
    CHECK((p * 0.0).is_zero());
}

TEST_CASE("poly_mul degree is additive and evaluation is a homomorphism") {
    std::mt19937 rng(11);
    std::uniform_int_distribution<int> deg(0, 8);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int i = 0; i < 500; ++i) {
        const Polynomial a = random_poly(rng, deg(rng));
        const Polynomial b = random_poly(rng, deg(rng));
        const Polynomial ab = a * b;
        CHECK(ab.degree() == a.degree() + b.degree());
        const cd s{u(rng), u(rng)};
        const cd lhs = poly_eval(ab, s);
        const cd rhs = poly_eval(a, s) * poly_eval(b, s);
        CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(rhs)));
    }
}

TEST_CASE("poly_eval") {
    CHECK(std::abs(poly_eval(Polynomial{1.0, 0.0, 1.0}, cd{0.0, 1.0})) == 0.0);
    CHECK(poly_eval(Polynomial{3.0}, cd{12.0, -4.0}) == cd{3.0, 0.0});
    CHECK(poly_eval(Polynomial{0.005, 0.06, 0.1001}, cd{0.0, 0.0}).real() == doctest::Approx(0.1001).epsilon(1e-15));
    CHECK(Polynomial{1.0, -3.0, 2.0}(2.0) == 0.0);
}

TEST_CASE("derivative and formatting") {
    CHECK(Polynomial{3.0, 2.0, 1.0}.derivative() == Polynomial{6.0, 2.0});
    CHECK(Polynomial{5.0}.derivative().is_zero());
    CHECK(Polynomial{-4.0, 1.0}.max_abs_coeff() == 4.0);
    CHECK_FALSE(to_string(Polynomial{1.0, 2.0}).empty());
}
