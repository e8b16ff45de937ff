#pragma once

// The three oracles the solver drives: an epsilon/2-feasibility search via
// a cutting-plane scheme, a subspace separation oracle, and an exact
// branch-and-bound integer linear optimizer.

#include <optional>

#include "conemin/functions.hpp"
#include "conemin/polytope.hpp"

namespace conemin {

struct FeasResult {
  std::optional<QVector> point;  // in P, all constraints <= epsilon/2
  int iterations = 0;
  // true when Empty came from the volume cutoff rather than an exhausted
  // localizer; such answers rest on the precision promise Delta.
  bool volume_cutoff = false;

  bool empty() const { return !point.has_value(); }
};

// Searches P for a point with every constraint value <= epsilon/2,
// preferring coordinates with denominator <= Delta. Empty means no point
// of P has all constraints <= 0 (up to the Delta promise; see
// volume_cutoff). P must be bounded.
FeasResult feasibility_oracle(const HPolytope& P, const Instance& inst);

// Separation within the affine subspace a + rowspan(directions): Inside
// when every constraint value at a is <= epsilon; otherwise a normal c in
// the row span, |c|_inf = 1, with c'x <= c'a for every x in the subspace
// with all constraints <= epsilon/2. Throws when the violated constraint's
// subgradient projects to zero on the subspace.
SeparationResult separation_oracle(const QMatrix& directions, const QVector& a,
                                   const Instance& inst);

struct IPOutcome {
  std::optional<QVector> point;  // integral, lex-smallest optimum
  Rational value;
  long nodes = 0;

  bool infeasible() const { return !point.has_value(); }
};

// Exact min objective'x over the integer points of a bounded P by
// depth-first branch and bound. Branches on the fractional coordinate
// with the largest denominator (ties: lowest index), floor side first.
IPOutcome linear_integer_optimize(const HPolytope& P, const QVector& objective);

}  // namespace conemin
