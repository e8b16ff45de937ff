#pragma once

// Bounded convex polytopes in halfspace representation, with exact vertex
// tracking. The incremental cutting machinery here backs most geometric
// reasoning in the library: vertex enumeration, redundancy removal,
// volumes, facet shrinking, and the localizer polytopes inside the
// feasibility oracle.

#include <optional>
#include <utility>
#include <vector>

#include "conemin/linalg.hpp"
#include "conemin/types.hpp"

namespace conemin {

struct HPolytope {
  QMatrix A;  // one inequality a'x <= b per row
  QVector b;

  HPolytope() : A(0, 0), b(0) {}
  explicit HPolytope(Eigen::Index dim) : A(0, dim), b(0) {}
  HPolytope(QMatrix normals, QVector offsets);

  Eigen::Index dim() const { return A.cols(); }
  Eigen::Index rows() const { return A.rows(); }

  const QMatrix& normals() const { return A; }
  const QVector& offsets() const { return b; }

  void add_row(const QVector& a, const Rational& beta);
  // x on the plane a'x = beta, added as a pair of opposing rows.
  void add_equality(const QVector& a, const Rational& beta);

  bool contains(const QVector& x) const;

  // Slack vector b - A x.
  QVector slacks(const QVector& x) const;

  static HPolytope box(const QVector& lo, const QVector& hi);
  static HPolytope cube(Eigen::Index n, const Rational& half_width);  // [-B, B]^n
};

// Scale each row so the normal is a primitive integer vector; drop exact
// duplicate rows (keeping first occurrences in order).
HPolytope canonicalize_rows(const HPolytope& P);

struct Vertex {
  QVector x;
  std::vector<Eigen::Index> active;  // row indices tight at x
};

// A bounded polytope carried together with its exact vertex set. Cutting
// by a halfspace updates the vertices incrementally and prunes rows that
// stop being facets.
class TrackedPolytope {
 public:
  // Corner-initialized box; lo < hi componentwise required.
  static TrackedPolytope from_box(const QVector& lo, const QVector& hi);

  // General polytope: bounding box via LPs, then one cut per row.
  // nullopt when P is empty; throws std::invalid_argument when unbounded.
  static std::optional<TrackedPolytope> from_polytope(const HPolytope& P);

  // Intersect with {a'x <= beta}. Returns false (and leaves the object in
  // an empty state) when the intersection has no points.
  bool cut(const QVector& a, const Rational& beta);

  bool empty() const { return verts_.empty(); }
  Eigen::Index dim() const { return rows_.dim(); }
  const std::vector<Vertex>& vertices() const { return verts_; }
  const HPolytope& poly() const { return rows_; }

  QVector vertex_centroid() const;
  Eigen::Index affine_dim() const;

  // Exact volume: full-dimensional Lebesgue measure; 0 when flat.
  Rational volume() const;

  // min / max of a linear functional over the polytope, by vertex scan.
  std::pair<Rational, Rational> extrema(const QVector& dir) const;

 private:
  TrackedPolytope() : rows_(0) {}
  void refresh_active_sets();
  void prune_rows();

  HPolytope rows_;
  std::vector<Vertex> verts_;
};

// Vertex set of a bounded polytope, deduplicated and sorted
// lexicographically.
std::vector<QVector> enumerate_vertices(const HPolytope& P);

// Independent route used for cross-checking: solve every dim-subset of
// rows and keep feasible solutions.
std::vector<QVector> enumerate_vertices_combinatorial(const HPolytope& P);

bool is_bounded(const HPolytope& P);

// Componentwise bounds; nullopt when empty, throws when unbounded.
std::optional<std::pair<QVector, QVector>> bounding_box(const HPolytope& P);

// Drop rows that are not facets (no vertex tight); rows keep their
// original relative order. Requires bounded nonempty input.
HPolytope remove_redundant(const HPolytope& P);

// Tighten every irredundant facet a_i'x <= b_i by rho_i / denominator,
// where rho_i = b_i - min{a_i'x : x in P}. Redundant rows are removed
// first. Requires a bounded polytope with at least one point.
HPolytope shrink_polytope(const HPolytope& P, const Int& denominator);

// Exact volume with respect to the affine hull of P. Full-dimensional
// bodies always succeed; lower-dimensional ones succeed whenever the hull
// admits an isometric rational parametrization (in particular all
// axis-aligned sections); otherwise throws std::domain_error.
Rational polytope_volume(const HPolytope& P);

// Volume spanned by a tracked vertex set within its affine hull.
Rational volume_in_affine_hull(const TrackedPolytope& tp);

// Square of the same measure; always rational, so threshold tests against
// flat bodies stay exact even when the volume itself is irrational.
Rational volume_squared_in_affine_hull(const TrackedPolytope& tp);

}  // namespace conemin
