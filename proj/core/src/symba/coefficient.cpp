#include "halfq/symba/coefficient.hpp"

#include <stdexcept>

namespace halfq::symba {

namespace {

std::string rational_str(const Rational& r) {
  using boost::multiprecision::denominator;
  using boost::multiprecision::numerator;
  const Integer num = numerator(r);
  const Integer den = denominator(r);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

double to_double(const Rational& r) { return r.convert_to<double>(); }

}  // namespace

Coefficient Coefficient::inverse() const {
  if (is_zero()) throw std::domain_error("division by zero coefficient");
  const Rational norm = re_ * re_ + im_ * im_;
  return {re_ / norm, -im_ / norm};
}

Coefficient& Coefficient::operator+=(const Coefficient& o) {
  re_ += o.re_;
  im_ += o.im_;
  return *this;
}

Coefficient& Coefficient::operator-=(const Coefficient& o) {
  re_ -= o.re_;
  im_ -= o.im_;
  return *this;
}

Coefficient& Coefficient::operator*=(const Coefficient& o) {
  if (o.im_ == 0) {
    re_ *= o.re_;
    im_ *= o.re_;
    return *this;
  }
  Rational re = re_ * o.re_ - im_ * o.im_;
  Rational im = re_ * o.im_ + im_ * o.re_;
  re_ = std::move(re);
  im_ = std::move(im);
  return *this;
}

Coefficient Coefficient::pow(int exponent) const {
  Coefficient base = exponent < 0 ? inverse() : *this;
  int e = exponent < 0 ? -exponent : exponent;
  Coefficient result(1);
  while (e > 0) {
    if (e & 1) result *= base;
    base *= base;
    e >>= 1;
  }
  return result;
}

std::complex<double> Coefficient::to_complex() const { return {to_double(re_), to_double(im_)}; }

double Coefficient::l1_magnitude() const {
  return std::abs(to_double(re_)) + std::abs(to_double(im_));
}

std::string Coefficient::str() const {
  if (im_ == 0) return rational_str(re_);
  std::string imag_part;
  if (im_ == 1) {
    imag_part = "i";
  } else if (im_ == -1) {
    imag_part = "-i";
  } else {
    imag_part = rational_str(im_) + "*i";
  }
  if (re_ == 0) return imag_part;
  if (im_ < 0) {
    std::string mag = im_ == -1 ? std::string("i") : rational_str(-im_) + "*i";
    return "(" + rational_str(re_) + " - " + mag + ")";
  }
  return "(" + rational_str(re_) + " + " + imag_part + ")";
}

Integer factorial(int n) {
  Integer f = 1;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

Integer binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  Integer c = 1;
  for (int j = 1; j <= k; ++j) {
    c *= (n - k + j);
    c /= j;
  }
  return c;
}

}  // namespace halfq::symba
