#pragma once

#include <compare>
#include <iosfwd>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

namespace selfsim {

using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

// "n" for integers, "n/d" otherwise.
std::string to_string(const Rational& q);
double to_double(const Rational& q);
Rational parse_rational(std::string_view text);

// Integer power of a rational, exponent may be negative.
Rational pow(const Rational& base, long exponent);

// Exact Gaussian rational: coefficients of algebra elements and trace values.
struct Scalar {
  Rational re;
  Rational im;

  Scalar() = default;
  Scalar(Rational real) : re(std::move(real)) {}  // NOLINT(google-explicit-constructor)
  Scalar(Rational real, Rational imag) : re(std::move(real)), im(std::move(imag)) {}
  Scalar(long real) : re(real) {}  // NOLINT(google-explicit-constructor)

  bool is_zero() const { return re == 0 && im == 0; }
  bool is_real() const { return im == 0; }
  Scalar conj() const { return {re, -im}; }

  Scalar& operator+=(const Scalar& o) {
    re += o.re;
    im += o.im;
    return *this;
  }
  Scalar& operator-=(const Scalar& o) {
    re -= o.re;
    im -= o.im;
    return *this;
  }
  Scalar& operator*=(const Scalar& o) {
    Rational r = re * o.re - im * o.im;
    im = re * o.im + im * o.re;
    re = std::move(r);
    return *this;
  }

  friend Scalar operator+(Scalar a, const Scalar& b) { return a += b; }
  friend Scalar operator-(Scalar a, const Scalar& b) { return a -= b; }
  friend Scalar operator*(Scalar a, const Scalar& b) { return a *= b; }
  friend Scalar operator-(const Scalar& a) { return {-a.re, -a.im}; }

  friend bool operator==(const Scalar& a, const Scalar& b) {
    return a.re == b.re && a.im == b.im;
  }
  // Lexicographic on (re, im); only used for canonical ordering.
  friend bool operator<(const Scalar& a, const Scalar& b) {
    if (a.re != b.re) return a.re < b.re;
    return a.im < b.im;
  }
};

// Element-format rendering: "3/4", "-1", "1/2+1/3i", "-2i".
std::string to_string(const Scalar& s);
Scalar parse_scalar(std::string_view text);
std::ostream& operator<<(std::ostream& os, const Scalar& s);

}  // namespace selfsim
