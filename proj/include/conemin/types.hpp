#pragma once

// Dense Eigen containers over the exact scalar types, and the small vector
// utilities shared across modules.

#include <boost/multiprecision/eigen.hpp>
#include <Eigen/Dense>

#include <vector>

#include "conemin/rational.hpp"

namespace conemin {

using QVector = Eigen::Matrix<Rational, Eigen::Dynamic, 1>;
using QMatrix = Eigen::Matrix<Rational, Eigen::Dynamic, Eigen::Dynamic>;
using ZVector = Eigen::Matrix<Int, Eigen::Dynamic, 1>;
using ZMatrix = Eigen::Matrix<Int, Eigen::Dynamic, Eigen::Dynamic>;

QVector to_rational(const ZVector& v);
QMatrix to_rational(const ZMatrix& m);

// Conversions that require integer entries; throw on a fractional entry.
ZVector to_integer(const QVector& v);
ZMatrix to_integer(const QMatrix& m);

bool is_integral(const QVector& v);

inline QVector make_qvector(std::initializer_list<Rational> xs) {
  QVector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (const auto& x : xs) v(i++) = x;
  return v;
}

Int gcd_of(const ZVector& v);

// Scale a rational vector to a primitive integer vector (entries coprime),
// preserving direction. Zero vector maps to zero.
ZVector primitive_direction(const QVector& v);

// Sign convention used for canonical hyperplane normals: first nonzero
// entry positive.
ZVector sign_normalized(const ZVector& v);

// Strict lexicographic comparison; true if a < b.
bool lex_less(const QVector& a, const QVector& b);
bool lex_less(const ZVector& a, const ZVector& b);

// Colexicographic comparison (last coordinate most significant).
bool colex_less(const ZVector& a, const ZVector& b);

Rational linf_norm(const QVector& v);
Rational l1_norm(const QVector& v);

std::string to_string(const QVector& v);

}  // namespace conemin
