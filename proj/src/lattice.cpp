#include "conemin/lattice.hpp"

#include "conemin/linalg.hpp"

namespace conemin {

QVector AffineLattice::point(const ZVector& z) const {
  if (z.size() != rank()) throw std::invalid_argument("AffineLattice::point: size mismatch");
  QVector x = origin;
  for (Eigen::Index i = 0; i < rank(); ++i)
    x += Rational(z(i)) * basis.row(i).transpose();
  return x;
}

AffineLattice AffineLattice::standard(Eigen::Index n) {
  AffineLattice l;
  l.origin = QVector::Zero(n);
  l.basis = QMatrix::Identity(n, n);
  return l;
}

std::optional<QVector> AffineLattice::coordinates(const QVector& x) const {
  // Solve basis' * z = x - origin in the least structured way that stays
  // exact: stacked as a linear system.
  QMatrix A = basis.transpose();
  auto z = solve_linear(A, x - origin);
  if (!z) return std::nullopt;
  // Verify (solve_linear returns some solution even for wide systems).
  QVector back = origin;
  for (Eigen::Index i = 0; i < rank(); ++i) back += (*z)(i)*basis.row(i).transpose();
  if (back != x) return std::nullopt;
  return z;
}

}  // namespace conemin
