#pragma once

// Given nested truncated cones with a lattice-point-free inner cone,
// produce a small family of hyperplanes that together contain every
// lattice point of the outer cone. Two constructions: a lattice-width
// driven one (default) and a grid-of-boxes one kept as the reference in
// dimension <= 3.

#include <vector>

#include "conemin/cone.hpp"
#include "conemin/lattice.hpp"

namespace conemin {

struct Hyperplane {
  ZVector w;  // lattice coordinates; nonzero, gcd 1
  Int k;      // the plane {z : w'z = k}
};

inline bool operator==(const Hyperplane& a, const Hyperplane& b) {
  return a.k == b.k && a.w == b.w;
}

enum class CoverStrategy { Flat, Boxes };

struct CoverReport {
  std::vector<Hyperplane> hyperplanes;  // sorted by (w lex, then k)
  CoverStrategy strategy = CoverStrategy::Flat;
  long boxes_examined = 0;  // grid cells enumerated before pruning
  Int bound = 0;            // cap on the family size; size() <= bound
};

// Both cones share the apex; small must sit inside big with no lattice
// point interior to it (the caller certifies this with an integer
// optimization call). Every lattice point of big lies on some returned
// hyperplane. The boxes strategy needs lattice rank <= 3 and falls back
// to the flat construction (relabeling the report) when the normalized
// cone escapes its grid. The lattice must be full-rank.
CoverReport cover_cone_lattice_points(const TruncatedCone& big,
                                      const TruncatedCone& small,
                                      const AffineLattice& lattice,
                                      CoverStrategy strategy);

}  // namespace conemin
