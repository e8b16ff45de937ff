#pragma once

// Lattice width: the integer direction (in lattice coordinates) along
// which a body is thinnest, found by scanning small combinations of an
// LLL-reduced basis adapted to the body's shape.

#include "conemin/lattice.hpp"
#include "conemin/polytope.hpp"
#include "conemin/types.hpp"

namespace conemin {

struct WidthResult {
  ZVector direction;  // lattice coordinates; primitive, sign-normalized
  Rational width;     // max - min of direction over the body
};

// Minimizes max w'z - min w'z over the body, z being lattice coordinates,
// among all nonzero w = k'U with ||k||_inf <= 2^rank, U an LLL basis of
// the coefficient lattice reduced under the body's vertex covariance
// form. Ties break toward the colexicographically smallest normalized
// direction. Body must be bounded and full-dimensional in the lattice's
// span.
WidthResult lattice_width(const TrackedPolytope& body, const AffineLattice& lattice);
WidthResult lattice_width(const HPolytope& body, const AffineLattice& lattice);

}  // namespace conemin
