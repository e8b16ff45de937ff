#include "conemin/types.hpp"

#include <sstream>

namespace conemin {

QVector to_rational(const ZVector& v) {
  QVector r(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) r(i) = Rational(v(i));
  return r;
}

QMatrix to_rational(const ZMatrix& m) {
  QMatrix r(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) r(i, j) = Rational(m(i, j));
  return r;
}

ZVector to_integer(const QVector& v) {
  ZVector r(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!is_integer(v(i))) throw std::invalid_argument("to_integer: fractional entry");
    r(i) = num(v(i));
  }
  return r;
}

ZMatrix to_integer(const QMatrix& m) {
  ZMatrix r(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (!is_integer(m(i, j))) throw std::invalid_argument("to_integer: fractional entry");
      r(i, j) = num(m(i, j));
    }
  return r;
}

bool is_integral(const QVector& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (!is_integer(v(i))) return false;
  return true;
}

Int gcd_of(const ZVector& v) {
  Int g = 0;
  for (Eigen::Index i = 0; i < v.size(); ++i) g = gcd(g, v(i));
  return abs(g);
}

ZVector primitive_direction(const QVector& v) {
  Int l = 1;
  for (Eigen::Index i = 0; i < v.size(); ++i) l = lcm(l, den(v(i)));
  ZVector z(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) z(i) = num(v(i)) * (l / den(v(i)));
  Int g = gcd_of(z);
  if (g > 1)
    for (Eigen::Index i = 0; i < z.size(); ++i) z(i) /= g;
  return z;
}

ZVector sign_normalized(const ZVector& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (v(i) != 0) return v(i) > 0 ? v : ZVector(-v);
  }
  return v;
}

template <typename V>
static bool lex_less_impl(const V& a, const V& b) {
  for (Eigen::Index i = 0; i < a.size() && i < b.size(); ++i) {
    if (a(i) < b(i)) return true;
    if (b(i) < a(i)) return false;
  }
  return a.size() < b.size();
}

bool lex_less(const QVector& a, const QVector& b) { return lex_less_impl(a, b); }
bool lex_less(const ZVector& a, const ZVector& b) { return lex_less_impl(a, b); }

bool colex_less(const ZVector& a, const ZVector& b) {
  for (Eigen::Index i = std::min(a.size(), b.size()); i-- > 0;) {
    if (a(i) < b(i)) return true;
    if (b(i) < a(i)) return false;
  }
  return a.size() < b.size();
}

Rational linf_norm(const QVector& v) {
  Rational m(0);
  for (Eigen::Index i = 0; i < v.size(); ++i) m = std::max(m, abs(v(i)));
  return m;
}

Rational l1_norm(const QVector& v) {
  Rational s(0);
  for (Eigen::Index i = 0; i < v.size(); ++i) s += abs(v(i));
  return s;
}

std::string to_string(const QVector& v) {
  std::ostringstream os;
  os << "(";
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) os << ", ";
    os << v(i);
  }
  os << ")";
  return os.str();
}

}  // namespace conemin
