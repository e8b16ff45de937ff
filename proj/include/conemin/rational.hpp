#pragma once

// Exact arithmetic base layer: arbitrary-precision integers and rationals
// (GMP-backed) plus the handful of rounding / parsing helpers the rest of
// the library needs. Everything downstream assumes these types are exact.

#include <boost/multiprecision/gmp.hpp>

#include <optional>
#include <stdexcept>
#include <string>

namespace conemin {

namespace mp = boost::multiprecision;

using Int = mp::number<mp::gmp_int, mp::et_off>;
using Rational = mp::number<mp::gmp_rational, mp::et_off>;

inline Int num(const Rational& q) { return numerator(q); }
inline Int den(const Rational& q) { return denominator(q); }

inline bool is_integer(const Rational& q) { return den(q) == 1; }

// floor(a/b) for exact integers, valid for negative values too.
Int floor_div(const Int& a, const Int& b);

Int floor_rat(const Rational& q);
Int ceil_rat(const Rational& q);

// Nearest integer; ties round away from zero (fixed so results are
// deterministic and symmetric under negation).
Int round_rat(const Rational& q);

inline int sign(const Rational& q) { return q.sign(); }
inline int sign(const Int& n) { return n.sign(); }

// Best rational approximation to q with denominator <= max_den, via the
// continued fraction of q (convergents and the relevant semiconvergent).
Rational rational_approx(const Rational& q, const Int& max_den);

// Nearest multiple of 1/den to q.
Rational round_to_denominator(const Rational& q, const Int& den);

// isqrt(n) = floor(sqrt(n)); n must be nonnegative.
Int isqrt(const Int& n);

// Exact square root if q is the square of a rational.
std::optional<Rational> exact_sqrt(const Rational& q);

// Rational r with |r - sqrt(q)| <= 2^-prec_bits, rounded toward zero
// (r <= sqrt(q) for q >= 0). q must be nonnegative.
Rational sqrt_lower(const Rational& q, unsigned prec_bits);

// Parse "p", "p/q" or a decimal string like "-0.25" into an exact rational.
Rational parse_rational(const std::string& text);

std::string to_string(const Rational& q);

// Decimal rendering with the given number of fractional digits, exact
// value truncated toward zero.
std::string decimal_string(const Rational& q, unsigned digits);

// Value of the form base + coeff*sqrt(rad) with rad >= 0. Closed under the
// comparisons the function algebra needs; lets norm expressions evaluate
// exactly even when the square root itself is irrational.
struct SqrtVal {
  Rational base;
  Rational coeff;
  Rational rad;

  SqrtVal() : base(0), coeff(0), rad(0) {}
  explicit SqrtVal(const Rational& b) : base(b), coeff(0), rad(0) {}
  SqrtVal(const Rational& b, const Rational& c, const Rational& r);

  bool is_rational() const { return coeff == 0; }
  // Throws unless the value is rational.
  Rational rational_value() const;

  int sign() const;
  double to_double() const;
  // Rational bounds with gap <= |coeff| * 2^-prec_bits.
  Rational lower(unsigned prec_bits = 96) const;
  Rational upper(unsigned prec_bits = 96) const;

  SqrtVal operator+(const Rational& r) const;
  SqrtVal operator-(const Rational& r) const;
  SqrtVal scaled(const Rational& s) const;

  // Sum of two values. Radicands must be compatible (equal up to a square
  // rational factor) unless one side is rational; otherwise the result
  // would need two radicals and we throw.
  SqrtVal operator+(const SqrtVal& other) const;
};

// Exact three-way comparison: sign of (a - b). Handles distinct radicands.
int compare(const SqrtVal& a, const SqrtVal& b);
inline int compare(const SqrtVal& a, const Rational& b) { return compare(a, SqrtVal(b)); }

inline bool leq(const SqrtVal& a, const Rational& b) { return compare(a, b) <= 0; }

std::string to_string(const SqrtVal& v);

}  // namespace conemin
