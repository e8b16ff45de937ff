#include "conemin/rational.hpp"

#include <cctype>
#include <sstream>

namespace conemin {

Int floor_div(const Int& a, const Int& b) {
  if (b == 0) throw std::invalid_argument("floor_div: division by zero");
  Int q = a / b;
  Int r = a - q * b;
  if (r != 0 && ((r < 0) != (b < 0))) --q;
  return q;
}

Int floor_rat(const Rational& q) { return floor_div(num(q), den(q)); }

Int ceil_rat(const Rational& q) { return -floor_rat(-q); }

Int round_rat(const Rational& q) {
  // floor(q + 1/2) would round half up; we want ties away from zero.
  if (q >= 0) {
    Int f = floor_rat(q);
    return (q - Rational(f)) * 2 >= 1 ? f + 1 : f;
  }
  return -round_rat(-q);
}

Rational rational_approx(const Rational& q, const Int& max_den) {
  if (max_den < 1) throw std::invalid_argument("rational_approx: max_den < 1");
  if (den(q) <= max_den) return q;
  // Stern-Brocot style walk keeping the best approximation seen so far.
  // p0/q0 and p1/q1 are consecutive convergents of the continued fraction.
  Int p0 = 1, q0 = 0;  // previous
  Int p1, q1 = 1;      // current
  Int a = floor_rat(q);
  p1 = a;
  Rational frac = q - Rational(a);
  while (frac != 0) {
    Rational inv = Rational(1) / frac;
    a = floor_rat(inv);
    frac = inv - Rational(a);
    Int p2 = a * p1 + p0;
    Int q2 = a * q1 + q0;
    if (q2 > max_den) {
      // Best semiconvergent with denominator within bound.
      Int k = floor_div(max_den - q0, q1);
      Int ps = k * p1 + p0;
      Int qs = k * q1 + q0;
      Rational conv(p1, q1);
      if (qs > 0) {
        Rational semi(ps, qs);
        return (abs(q - semi) < abs(q - conv)) ? semi : conv;
      }
      return conv;
    }
    p0 = p1; q0 = q1;
    p1 = p2; q1 = q2;
  }
  return Rational(p1, q1);
}

Rational round_to_denominator(const Rational& q, const Int& d) {
  if (d < 1) throw std::invalid_argument("round_to_denominator: den < 1");
  return Rational(round_rat(q * Rational(d)), d);
}

Int isqrt(const Int& n) {
  if (n < 0) throw std::invalid_argument("isqrt: negative argument");
  Int r = sqrt(n);  // gmp mpz sqrt truncates
  return r;
}

std::optional<Rational> exact_sqrt(const Rational& q) {
  if (q < 0) return std::nullopt;
  Int n = num(q), d = den(q);
  Int rn = isqrt(n), rd = isqrt(d);
  if (rn * rn == n && rd * rd == d) return Rational(rn, rd);
  return std::nullopt;
}

Rational sqrt_lower(const Rational& q, unsigned prec_bits) {
  if (q < 0) throw std::invalid_argument("sqrt_lower: negative argument");
  if (q == 0) return Rational(0);
  if (auto e = exact_sqrt(q)) return *e;
  // sqrt(n/d) = sqrt(n*d)/d; scale so the integer sqrt carries prec bits.
  Int scale = Int(1) << prec_bits;
  Int nd = num(q) * den(q);
  Int root = isqrt(nd * scale * scale);  // floor(sqrt(q) * d * scale)
  return Rational(root, den(q) * scale);
}

namespace {

bool parse_decimal(const std::string& s, Rational& out) {
  auto dot = s.find('.');
  if (dot == std::string::npos) return false;
  std::string head = s.substr(0, dot);
  std::string tail = s.substr(dot + 1);
  if (tail.empty()) return false;
  for (char c : tail)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  bool negative = false;
  if (!head.empty() && (head[0] == '-' || head[0] == '+')) {
    negative = head[0] == '-';
    head = head.substr(1);
  }
  if (head.empty()) head = "0";
  for (char c : head)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  Int ip(head);
  Int frac(tail);
  Int pow10 = 1;
  for (size_t i = 0; i < tail.size(); ++i) pow10 *= 10;
  Rational v = Rational(ip) + Rational(frac, pow10);
  out = negative ? -v : v;
  return true;
}

}  // namespace

Rational parse_rational(const std::string& text) {
  std::string s;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) s += c;
  if (s.empty()) throw std::invalid_argument("parse_rational: empty string");
  try {
    Rational dec;
    if (parse_decimal(s, dec)) return dec;
    auto slash = s.find('/');
    if (slash != std::string::npos) {
      Int n(s.substr(0, slash));
      Int d(s.substr(slash + 1));
      if (d == 0) throw std::invalid_argument("zero denominator");
      return Rational(n, d);
    }
    return Rational(Int(s));
  } catch (const std::exception&) {
    throw std::invalid_argument("parse_rational: cannot parse '" + text + "'");
  }
}

std::string to_string(const Rational& q) {
  std::ostringstream os;
  os << q;
  return os.str();
}

std::string decimal_string(const Rational& q, unsigned digits) {
  Int scale = 1;
  for (unsigned i = 0; i < digits; ++i) scale *= 10;
  Int scaled = num(q) * scale / den(q);  // truncates toward zero
  bool neg = scaled < 0;
  std::string body = abs(scaled).convert_to<std::string>();
  if (body.size() <= digits) body.insert(0, digits + 1 - body.size(), '0');
  body.insert(body.size() - digits, ".");
  // strip trailing zeros but keep at least one fractional digit
  size_t last = body.find_last_not_of('0');
  if (body[last] == '.') ++last;
  body.erase(last + 1);
  return neg ? "-" + body : body;
}

SqrtVal::SqrtVal(const Rational& b, const Rational& c, const Rational& r)
    : base(b), coeff(c), rad(r) {
  if (rad < 0) throw std::invalid_argument("SqrtVal: negative radicand");
  if (auto e = exact_sqrt(rad)) {
    base += coeff * *e;
    coeff = 0;
    rad = 0;
  }
  if (coeff == 0) rad = 0;
}

Rational SqrtVal::rational_value() const {
  if (!is_rational()) throw std::logic_error("SqrtVal: irrational value");
  return base;
}

namespace {

// sign of a + b*sqrt(r), with r >= 0 not a perfect square unless b == 0
int sign1(const Rational& a, const Rational& b, const Rational& r) {
  if (b == 0 || r == 0) return a.sign();
  if (a == 0) return b.sign();
  if (a.sign() == b.sign()) return a.sign();
  // opposite signs: compare a^2 against b^2 r
  int cmp = (a * a).compare(b * b * r);
  if (cmp == 0) return 0;
  // |a| > |b|sqrt(r) means sign(a) wins
  return cmp > 0 ? a.sign() : b.sign();
}

}  // namespace

int SqrtVal::sign() const { return sign1(base, coeff, rad); }

double SqrtVal::to_double() const {
  double v = base.convert_to<double>();
  if (coeff != 0) v += coeff.convert_to<double>() * std::sqrt(rad.convert_to<double>());
  return v;
}

Rational SqrtVal::lower(unsigned prec_bits) const {
  if (is_rational()) return base;
  Rational s = sqrt_lower(rad, prec_bits + 4);
  Rational err = Rational(1, Int(1) << prec_bits);
  // s <= sqrt(rad) <= s + err
  return coeff > 0 ? base + coeff * s : base + coeff * (s + err);
}

Rational SqrtVal::upper(unsigned prec_bits) const {
  if (is_rational()) return base;
  Rational s = sqrt_lower(rad, prec_bits + 4);
  Rational err = Rational(1, Int(1) << prec_bits);
  return coeff > 0 ? base + coeff * (s + err) : base + coeff * s;
}

SqrtVal SqrtVal::operator+(const Rational& r) const {
  SqrtVal v = *this;
  v.base += r;
  return v;
}

SqrtVal SqrtVal::operator-(const Rational& r) const {
  SqrtVal v = *this;
  v.base -= r;
  return v;
}

SqrtVal SqrtVal::scaled(const Rational& s) const {
  if (s == 0) return SqrtVal(Rational(0));
  return SqrtVal(base * s, coeff * s, rad);
}

SqrtVal SqrtVal::operator+(const SqrtVal& other) const {
  if (other.coeff == 0) return *this + other.base;
  if (coeff == 0) return other + base;
  if (rad == other.rad) return SqrtVal(base + other.base, coeff + other.coeff, rad);
  // sqrt(r1) = t*sqrt(r2) when r1/r2 is a square
  if (auto t = exact_sqrt(rad / other.rad))
    return SqrtVal(base + other.base, coeff * *t + other.coeff, other.rad);
  throw std::domain_error("SqrtVal: sum needs two distinct radicals");
}

int compare(const SqrtVal& a, const SqrtVal& b) {
  // sign of (a.base - b.base) + a.coeff*sqrt(a.rad) - b.coeff*sqrt(b.rad)
  Rational d = a.base - b.base;
  if (a.coeff == 0) return sign1(-d, b.coeff, b.rad) * -1;
  if (b.coeff == 0) return sign1(d, a.coeff, a.rad);
  if (a.rad == b.rad) return sign1(d, a.coeff - b.coeff, a.rad);
  // Two distinct radicals: decide sign of u - v where u = d + a.coeff*sqrt(a.rad)
  // and v = b.coeff*sqrt(b.rad). Compare via signs first, then square.
  int su = sign1(d, a.coeff, a.rad);
  int sv = b.coeff.sign();
  if (su >= 0 && sv < 0) return su == 0 ? 1 : 1;
  if (su <= 0 && sv > 0) return -1;
  if (su == 0 && sv == 0) return 0;
  if (su == 0) return sv > 0 ? -1 : 1;
  if (sv == 0) return su;
  // same nonzero sign: compare u^2 vs v^2 (one radical remains)
  Rational u2base = d * d + a.coeff * a.coeff * a.rad;
  Rational u2coeff = 2 * d * a.coeff;
  Rational v2 = b.coeff * b.coeff * b.rad;
  int c2 = sign1(u2base - v2, u2coeff, a.rad);
  return su > 0 ? c2 : -c2;
}

std::string to_string(const SqrtVal& v) {
  if (v.is_rational()) return to_string(v.base);
  std::ostringstream os;
  os << v.base << (v.coeff > 0 ? "+" : "") << v.coeff << "*sqrt(" << v.rad << ")";
  return os.str();
}

}  // namespace conemin
