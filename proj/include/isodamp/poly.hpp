#pragma once

#include <complex>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace isodamp {

// Real polynomial in s, coefficients in descending powers (coeffs[0] leads).
// The zero polynomial is stored as the single coefficient 0. Leading
// coefficients with magnitude below kLeadingTolerance are stripped on
// construction so cancellation never inflates the degree.
class Polynomial {
public:
    static constexpr double kLeadingTolerance = 1e-12;

    Polynomial();
    Polynomial(std::initializer_list<double> coeffs);
    explicit Polynomial(std::vector<double> coeffs);

    static Polynomial constant(double c);
    // s^n
    static Polynomial monomial(int n, double c = 1.0);

    const std::vector<double>& coeffs() const noexcept { return coeffs_; }
    int degree() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }
    bool is_zero() const noexcept { return coeffs_.size() == 1 && coeffs_[0] == 0.0; }
    double leading() const noexcept { return coeffs_.front(); }

    // Coefficient of s^power (0 when power exceeds the degree).
    double coefficient(int power) const noexcept;

    std::complex<double> operator()(std::complex<double> s) const;
    double operator()(double s) const;

    Polynomial derivative() const;
    double max_abs_coeff() const noexcept;

    friend bool operator==(const Polynomial&, const Polynomial&) = default;

private:
    std::vector<double> coeffs_;
};

Polynomial operator+(const Polynomial& a, const Polynomial& b);
Polynomial operator-(const Polynomial& a, const Polynomial& b);
Polynomial operator-(const Polynomial& a);
Polynomial operator*(const Polynomial& a, const Polynomial& b);
Polynomial operator*(double c, const Polynomial& p);
Polynomial operator*(const Polynomial& p, double c);

inline Polynomial poly_add(const Polynomial& a, const Polynomial& b) { return a + b; }
inline Polynomial poly_mul(const Polynomial& a, const Polynomial& b) { return a * b; }
inline std::complex<double> poly_eval(const Polynomial& p, std::complex<double> s) { return p(s); }

std::string to_string(const Polynomial& p);

} // namespace isodamp
