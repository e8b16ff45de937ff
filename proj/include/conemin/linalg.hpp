#pragma once

// Exact dense linear algebra: Gaussian elimination kernels, a rational
// simplex LP solver with verifiable certificates, LLL basis reduction, and
// Hermite-normal-form based solving of linear Diophantine equations.

#include <optional>
#include <variant>
#include <vector>

#include "conemin/lattice.hpp"
#include "conemin/types.hpp"

namespace conemin {

// ---- Gaussian elimination utilities ----

Eigen::Index rank_of(const QMatrix& m);

Rational determinant(const QMatrix& m);

// Solve A x = b exactly; nullopt if inconsistent. When the system is
// underdetermined an arbitrary (deterministic) solution is returned.
std::optional<QVector> solve_linear(const QMatrix& A, const QVector& b);

// Inverse of a square nonsingular matrix; throws on singular input.
QMatrix inverse(const QMatrix& m);

// Rows spanning the null space of A (right kernel: A x = 0).
QMatrix kernel_basis(const QMatrix& A);

// Affine rank of a point set (dimension of its affine hull).
Eigen::Index affine_dim(const std::vector<QVector>& points);

// ---- Linear programming ----

struct HPolytope;  // defined in polytope.hpp

enum class LPStatus { Optimal, Infeasible, Unbounded };

// Outcome of min/max c'x over {x : A x <= b}. For Optimal, `dual` holds
// multipliers y >= 0 with A'y = -c and -b'y = value (minimization form);
// for Infeasible it is a Farkas certificate: y >= 0, A'y = 0, b'y < 0.
struct LPOutcome {
  LPStatus status = LPStatus::Infeasible;
  QVector point;
  Rational value;
  QVector dual;
};

enum class LPSense { Min, Max };

LPOutcome lp_solve(const QMatrix& A, const QVector& b, const QVector& objective,
                   LPSense sense);
LPOutcome lp_solve(const HPolytope& P, const QVector& objective, LPSense sense);

// ---- Lattice basis reduction ----

// LLL with delta = 3/4 on the rows of `basis` (rationals allowed; the
// lattice is scaled to integers internally and scaled back). Rows must be
// linearly independent.
QMatrix lll_reduce(const QMatrix& basis);

// LLL of the abstract lattice Z^r under the inner product <x,y> = x' G y
// (G symmetric positive definite). Returns the unimodular transform U whose
// rows are the reduced basis coefficients: row i of U is the i-th reduced
// vector expressed in the original basis.
ZMatrix lll_reduce_form(const QMatrix& G);

// ---- Hermite normal form / Diophantine solving ----

// Row-style Hermite normal form of an integer matrix: H = U * B with U
// unimodular. H has nonnegative pivot-led rows in echelon form, entries
// above each pivot reduced; zero rows sink to the bottom. The form is
// canonical, so equal row lattices give equal H.
struct HNFResult {
  ZMatrix H;
  ZMatrix U;
  Eigen::Index rank = 0;
};

HNFResult hermite_normal_form(const ZMatrix& B);

// True if the rows of A and B generate the same lattice.
bool same_lattice(const ZMatrix& A, const ZMatrix& B);

// Solution set of w'z = k over the given affine lattice (w, k in lattice
// coordinates). Returns the section as a lattice of rank one less, or
// nullopt when gcd(w) does not divide k - no solutions. w must be nonzero.
std::optional<AffineLattice> hnf_solve(const ZVector& w, const Int& k,
                                       const AffineLattice& lattice);

}  // namespace conemin
