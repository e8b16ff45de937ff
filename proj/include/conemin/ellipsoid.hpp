#pragma once

// Inscribed / enclosing ellipsoid pairs around a full-dimensional polytope.
// The shape is found numerically and then certified exactly, so downstream
// users may rely on the containments unconditionally.

#include "conemin/polytope.hpp"
#include "conemin/types.hpp"

namespace conemin {

// E = {center + u : u' shape^{-1} u <= 1} satisfies E ⊆ P ⊆ center + kappa·E.
struct EllipsoidPair {
  QVector center;
  QMatrix shape;  // positive definite
  bool inner_verified = false;
  Rational kappa;
};

// Ascent toward the minimum volume enclosing ellipsoid of the vertex set
// in floating point, rationalized, then scaled down until the inscribed
// containment verifies exactly; the enclosing factor is measured exactly
// on the vertices. P must be bounded and full-dimensional; degenerate
// input throws std::invalid_argument.
EllipsoidPair inscribed_loewner_pair(const HPolytope& P);
EllipsoidPair inscribed_loewner_pair(const TrackedPolytope& tp);

}  // namespace conemin
