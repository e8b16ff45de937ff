#pragma once

// Affine lattices: origin + integer combinations of basis rows. Used both
// for the ambient integer lattice and for the sublattices produced when the
// solver restricts to a hyperplane.

#include "conemin/types.hpp"

namespace conemin {

struct AffineLattice {
  QVector origin;  // ambient coordinates
  QMatrix basis;   // one basis vector per row; rows() == rank

  Eigen::Index rank() const { return basis.rows(); }
  Eigen::Index ambient_dim() const { return origin.size(); }

  // Point for integer coefficient vector z (|z| == rank()).
  QVector point(const ZVector& z) const;

  static AffineLattice standard(Eigen::Index n);

  // Lattice coordinates of an ambient point, if the point lies in the
  // affine span of the lattice. Requires linearly independent basis rows.
  // The returned coordinates are rational; integrality means lattice
  // membership.
  std::optional<QVector> coordinates(const QVector& x) const;
};

}  // namespace conemin
