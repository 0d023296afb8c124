#include "isodamp/poly.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace isodamp {

namespace {

std::vector<double> normalized(std::vector<double> c) {
    auto first = std::find_if(c.begin(), c.end(),
                              [](double v) { return std::abs(v) >= Polynomial::kLeadingTolerance; });
    c.erase(c.begin(), first);
    if (c.empty()) c.push_back(0.0);
    return c;
}

} // namespace

Polynomial::Polynomial() : coeffs_{0.0} {}

Polynomial::Polynomial(std::initializer_list<double> coeffs)
    : coeffs_(normalized(std::vector<double>(coeffs))) {}

Polynomial::Polynomial(std::vector<double> coeffs) : coeffs_(normalized(std::move(coeffs))) {}

Polynomial Polynomial::constant(double c) { return Polynomial{c}; }

Polynomial Polynomial::monomial(int n, double c) {
    std::vector<double> v(static_cast<size_t>(n) + 1, 0.0);
    v[0] = c;
    return Polynomial(std::move(v));
}

double Polynomial::coefficient(int power) const noexcept {
    if (power < 0 || power > degree()) return 0.0;
    return coeffs_[static_cast<size_t>(degree() - power)];
}

std::complex<double> Polynomial::operator()(std::complex<double> s) const {
    std::complex<double> acc{0.0, 0.0};
    for (double c : coeffs_) acc = acc * s + c;
    return acc;
}

double Polynomial::operator()(double s) const {
    double acc = 0.0;
    for (double c : coeffs_) acc = acc * s + c;
    return acc;
}

Polynomial Polynomial::derivative() const {
    const int n = degree();
    if (n == 0) return Polynomial{};
    std::vector<double> d(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) d[static_cast<size_t>(i)] = coeffs_[static_cast<size_t>(i)] * (n - i);
    return Polynomial(std::move(d));
}

double Polynomial::max_abs_coeff() const noexcept {
    double m = 0.0;
    for (double c : coeffs_) m = std::max(m, std::abs(c));
    return m;
}

Polynomial operator+(const Polynomial& a, const Polynomial& b) {
    const auto& x = a.coeffs();
    const auto& y = b.coeffs();
    const size_t n = std::max(x.size(), y.size());
    std::vector<double> out(n, 0.0);
    // align at the constant term
    for (size_t i = 0; i < x.size(); ++i) out[n - x.size() + i] += x[i];
    for (size_t i = 0; i < y.size(); ++i) out[n - y.size() + i] += y[i];
    return Polynomial(std::move(out));
}

Polynomial operator-(const Polynomial& a) { return -1.0 * a; }

Polynomial operator-(const Polynomial& a, const Polynomial& b) { return a + (-b); }

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    if (a.is_zero() || b.is_zero()) return Polynomial{};
    const auto& x = a.coeffs();
    const auto& y = b.coeffs();
    std::vector<double> out(x.size() + y.size() - 1, 0.0);
    for (size_t i = 0; i < x.size(); ++i)
        for (size_t j = 0; j < y.size(); ++j) out[i + j] += x[i] * y[j];
    return Polynomial(std::move(out));
}

Polynomial operator*(double c, const Polynomial& p) {
    std::vector<double> out = p.coeffs();
    for (double& v : out) v *= c;
    return Polynomial(std::move(out));
}

Polynomial operator*(const Polynomial& p, double c) { return c * p; }

std::string to_string(const Polynomial& p) {
    std::string out;
    const int n = p.degree();
    for (int i = 0; i <= n; ++i) {
        const double c = p.coeffs()[static_cast<size_t>(i)];
        if (c == 0.0 && n > 0) continue;
        char buf[64];
        const int power = n - i;
        if (power == 0)
            std::snprintf(buf, sizeof buf, "%s%.6g", out.empty() ? "" : " + ", c);
        else if (power == 1)
            std::snprintf(buf, sizeof buf, "%s%.6g s", out.empty() ? "" : " + ", c);
        else
            std::snprintf(buf, sizeof buf, "%s%.6g s^%d", out.empty() ? "" : " + ", c, power);
        out += buf;
    }
    return out.empty() ? "0" : out;
}

} // namespace isodamp
