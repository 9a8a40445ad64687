#pragma once

#include <complex>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace halfq::symba {

using Rational = boost::multiprecision::cpp_rational;
using Integer = boost::multiprecision::cpp_int;

/// Exact complex scalar re + i*im with rational parts.
class Coefficient {
 public:
  Coefficient() = default;
  Coefficient(long long value) : re_(value) {}  // NOLINT(google-explicit-constructor)
  Coefficient(Rational re) : re_(std::move(re)) {}  // NOLINT(google-explicit-constructor)
  Coefficient(Rational re, Rational im) : re_(std::move(re)), im_(std::move(im)) {}

  static Coefficient imaginary_unit() { return {Rational(0), Rational(1)}; }
  static Coefficient ratio(long long num, long long den) { return Coefficient(Rational(num, den)); }

  const Rational& real() const { return re_; }
  const Rational& imag() const { return im_; }

  bool is_zero() const { return re_ == 0 && im_ == 0; }
  bool is_real() const { return im_ == 0; }

  Coefficient conj() const { return {re_, -im_}; }
  Coefficient inverse() const;  // throws std::domain_error on zero

  Coefficient& operator+=(const Coefficient& o);
  Coefficient& operator-=(const Coefficient& o);
  Coefficient& operator*=(const Coefficient& o);
  Coefficient& operator/=(const Coefficient& o) { return *this *= o.inverse(); }

  friend Coefficient operator+(Coefficient a, const Coefficient& b) { return a += b; }
  friend Coefficient operator-(Coefficient a, const Coefficient& b) { return a -= b; }
  friend Coefficient operator*(Coefficient a, const Coefficient& b) { return a *= b; }
  friend Coefficient operator/(Coefficient a, const Coefficient& b) { return a /= b; }
  Coefficient operator-() const { return {-re_, -im_}; }

  friend bool operator==(const Coefficient& a, const Coefficient& b) {
    return a.re_ == b.re_ && a.im_ == b.im_;
  }

  /// Integer power; negative exponents invert.
  Coefficient pow(int exponent) const;

  std::complex<double> to_complex() const;
  /// |re| + |im|, used for magnitude comparisons between grades.
  double l1_magnitude() const;

  /// Grammar-compatible rendering, e.g. "3/4", "-1/2*i", "(1 + 1/2*i)".
  std::string str() const;

 private:
  Rational re_{0};
  Rational im_{0};
};

/// n! as an exact integer.
Integer factorial(int n);
/// Binomial coefficient C(n, k); zero outside 0 <= k <= n.
Integer binomial(int n, int k);

}  // namespace halfq::symba
