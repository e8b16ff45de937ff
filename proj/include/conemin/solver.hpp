#pragma once

// The main search: decide epsilon-feasibility over the integer points of a
// box-bounded convex system, or minimize an objective over them to within
// epsilon. The driver decomposes the box into cones over its facets, shaves
// each cone with oracle-guided cuts until an integer optimum certifies the
// remainder lattice-point-free, covers what is left by a small family of
// hyperplanes, and recurses on each hyperplane one dimension lower.
// Trailing continuous coordinates are handled by embedding an inner
// continuous minimization into every integer-point query.

#include <optional>
#include <string>
#include <vector>

#include "conemin/covering.hpp"
#include "conemin/functions.hpp"
#include "conemin/lattice.hpp"
#include "conemin/polytope.hpp"
#include "conemin/rational.hpp"
#include "conemin/types.hpp"

namespace conemin {

// One accepted cut inside a facet descent: the kept side is normal'z <=
// rhs, in the coordinates of the subproblem at that depth. Volumes are
// exact cone volumes on both sides of the cut, filled in when tracing so
// the shrink factor can be audited after the fact.
struct CutRecord {
  int depth = 0;
  int facet = -1;  // 2 * axis + (upper side ? 1 : 0)
  int iteration = 0;
  QVector normal;
  Rational rhs = 0;
  Rational vol_before = 0;
  Rational vol_after = 0;
};

struct CoverEvent {
  int depth = 0;
  CoverReport report;
};

// Machine-readable account of a solve: accepted cuts, covering calls,
// oracle traffic, and free-form decision notes.
struct SolveTrace {
  std::vector<CutRecord> cuts;
  std::vector<CoverEvent> covers;
  std::vector<std::string> events;
  long oracle_calls = 0;
  long separation_calls = 0;
  long ip_calls = 0;
  long inner_minimizations = 0;

  std::string to_json() const;
};

struct SolverOptions {
  CoverStrategy strategy = CoverStrategy::Flat;
  // Root facet descents may run in up to this many threads; the outcome
  // and trace are identical to the sequential ones.
  int parallel = 1;
  SolveTrace* trace = nullptr;  // optional, not owned
};

// A solve in progress: functions over the current coordinates, the affine
// embedding of those coordinates into the original integer block, and the
// coordinate box still to be searched. Recursing on a hyperplane produces
// a Subproblem with one integer dimension fewer.
struct Subproblem {
  Instance instance;      // reparametrized into the current coordinates
  AffineLattice lattice;  // rows: current basis in original coordinates
  HPolytope box;          // coordinate box over the integer block
  Int continuous_bound;   // half-width of the continuous block's box
  int depth = 0;
  std::vector<std::string> trail;  // decisions leading to this subproblem
};

Subproblem root_subproblem(const Instance& inst);

// Feasible carries a point in original coordinates (integer block
// integral, any continuous block appended) with every constraint value at
// most epsilon, exactly. An empty point means no integer point of the box
// satisfies every constraint at level zero.
struct SolveOutcome {
  std::optional<QVector> point;
  std::vector<SqrtVal> values;     // constraint values at point
  std::vector<std::string> trail;  // decision notes, mostly for Infeasible
  bool feasible() const { return point.has_value(); }
};

struct MinimizeOutcome {
  std::optional<QVector> point;
  SqrtVal value;  // objective value at point, exact
  std::vector<SqrtVal> values;
  std::vector<std::string> trail;
  bool feasible() const { return point.has_value(); }
};

SolveOutcome solve_feasibility(const Instance& inst, const SolverOptions& opts = {});
SolveOutcome solve_feasibility(const Subproblem& sub, const SolverOptions& opts = {});

// Descend the cone conv({y}, F) where F is the facet of sub.box on the
// given axis (upper or lower side) and y is a relaxed-feasible point off
// that facet's plane. Returns Feasible only with a point of this cone;
// an empty outcome certifies the cone holds no acceptable integer point.
SolveOutcome facet_descent(const QVector& y, Eigen::Index axis, bool upper,
                           const Subproblem& sub, const SolverOptions& opts = {});

// Restrict the search to {w'z = k} in current coordinates, intersect with
// `region`, reparametrize to one integer dimension fewer and solve.
SolveOutcome recurse_on_hyperplane(const Subproblem& sub, const Hyperplane& H,
                                   const HPolytope& region,
                                   const SolverOptions& opts = {});

SolveOutcome base_case_1d(const Subproblem& sub, const SolverOptions& opts = {});

// Binary search on the objective level. The returned value is within
// epsilon of the best objective over integer points whose constraints all
// hold at level epsilon/2 (in particular over those holding at level
// zero); Infeasible certifies that even the epsilon/2 level set holds no
// integer point.
MinimizeOutcome minimize(const Instance& inst, const SolverOptions& opts = {});

// Same contract in the presence of trailing continuous coordinates. With
// mixed_continuous == 0 this is exactly minimize.
MinimizeOutcome mixed_integer_minimize(const Instance& inst,
                                       const SolverOptions& opts = {});

}  // namespace conemin
