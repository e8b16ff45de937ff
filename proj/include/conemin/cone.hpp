#pragma once

// Truncated cones conv({apex}, base) where the base lies in a hyperplane
// the apex avoids. The halfspace representation is built by lifting each
// base constraint to the unique hyperplane through the apex and the
// constraint's trace on the base plane.

#include "conemin/polytope.hpp"
#include "conemin/types.hpp"

namespace conemin {

struct TruncatedCone {
  QVector apex;
  QVector base_normal;  // base plane {base_normal'x = base_level}
  Rational base_level;
  HPolytope base;  // constraints carving the base out of its plane
  HPolytope hrep;  // conv({apex}, base): lifted rows plus the plane row
};

// Build conv({apex}, base ∩ {normal'x = level}). The base rows are read in
// ambient coordinates; rows parallel to the plane (including the plane's
// own equality pair, if present) lift to redundant or vanishing rows and
// are dropped. The apex must be strictly off the plane.
TruncatedCone cone_over_base(const QVector& apex, const HPolytope& base,
                             const QVector& normal, const Rational& level);

}  // namespace conemin
