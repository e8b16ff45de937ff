#pragma once

// The convex function algebra the solver minimizes over: affine forms,
// positive semidefinite quadratics, scaled p-norms of affine maps, and
// pointwise maxima / nonnegative sums of those. Everything evaluates
// exactly; a value containing a square root is carried as a SqrtVal so
// threshold tests stay exact decisions.

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "conemin/rational.hpp"
#include "conemin/types.hpp"

namespace conemin {

struct FunctionExpr;

// a'x + b
struct Affine {
  QVector a;
  Rational b;
};

// x'Qx + a'x + b, Q symmetric positive semidefinite
struct Quadratic {
  QMatrix Q;
  QVector a;
  Rational b;
};

// scale * ||M x + v||_p with p in {1, 2} or kInfNorm, scale >= 0
inline constexpr int kInfNorm = 0;
struct NormOfAffine {
  int p = 2;
  QMatrix M;
  QVector v;
  Rational scale = 1;
};

struct MaxExpr {
  std::vector<FunctionExpr> parts;
};

// sum_i weights[i] * parts[i], weights >= 0
struct SumExpr {
  std::vector<FunctionExpr> parts;
  std::vector<Rational> weights;
};

struct FunctionExpr {
  std::variant<Affine, Quadratic, NormOfAffine, MaxExpr, SumExpr> node;

  FunctionExpr() : node(Affine{QVector::Zero(0), Rational(0)}) {}
  FunctionExpr(Affine f) : node(std::move(f)) {}
  FunctionExpr(Quadratic f) : node(std::move(f)) {}
  FunctionExpr(NormOfAffine f) : node(std::move(f)) {}
  FunctionExpr(MaxExpr f) : node(std::move(f)) {}
  FunctionExpr(SumExpr f) : node(std::move(f)) {}
};

// Exact positive semidefiniteness of a symmetric rational matrix
// (diagonal-pivoted elimination; no floating point involved).
bool is_psd(const QMatrix& S);

// Throws std::invalid_argument when the expression is malformed for
// dimension n: shape mismatches, non-symmetric or indefinite Q, bad p,
// negative scale or weights, empty max/sum.
void validate(const FunctionExpr& f, Eigen::Index n);

// Exact value, possibly carrying one radical (2-norms). Throws
// std::domain_error if a sum would need two incommensurable radicals.
SqrtVal eval(const FunctionExpr& f, const QVector& x);

// Exact rational value; throws std::domain_error when the value is
// irrational (use level_leq for threshold decisions in that case).
Rational evaluate(const FunctionExpr& f, const QVector& x);

// Exact test f(x) <= tau.
bool level_leq(const FunctionExpr& f, const QVector& x, const Rational& tau);

// Exact subgradient where one exists in rational arithmetic; throws
// std::domain_error when the exact subgradient is irrational (2-norm at a
// point whose norm is not rational).
QVector subgradient(const FunctionExpr& f, const QVector& x);

// Rational subgradient approximation with a certified l1 error bound:
// there is an exact subgradient g* with ||g - g*||_1 <= err_l1, and
// err_l1 <= err_budget (err_budget > 0). Exact cases come back with
// err_l1 = 0.
struct Subgradient {
  QVector g;
  Rational err_l1;
};
Subgradient subgradient_certified(const FunctionExpr& f, const QVector& x,
                                  const Rational& err_budget);

// Composition with the affine map x = A z + c; stays inside the algebra.
FunctionExpr substitute(const FunctionExpr& f, const QMatrix& A, const QVector& c);

// Conservative upper bound on |f| over [-B, B]^n (interval-style, never
// smaller than the true sup of |f|).
Rational upper_bound_abs(const FunctionExpr& f, const Rational& B);

// Reference evaluator in doubles, for sanity cross-checks only.
double eval_double(const FunctionExpr& f, const Eigen::VectorXd& x);

// Input dimension the expression expects (columns of its linear parts).
Eigen::Index input_dim(const FunctionExpr& f);

struct Instance {
  Eigen::Index n = 0;              // number of integer variables
  Int B = 0;                       // K_0, K_eps assumed inside [-B, B]^n
  Int Delta = 1;                   // precision denominator for oracle points
  Int M = 1;                       // promised bound on |f_i| over the box
  Rational epsilon = 0;
  std::optional<FunctionExpr> objective;
  std::vector<FunctionExpr> constraints;
  Eigen::Index mixed_continuous = 0;  // trailing continuous coordinates

  Eigen::Index total_dim() const { return n + mixed_continuous; }
};

// Hard violations (nonpositive B / Delta / M / epsilon, malformed
// expressions) throw std::invalid_argument; returns warnings for promises
// that cannot be certified, like |f_i| <= M failing the interval check.
std::vector<std::string> validate_instance(const Instance& inst);

// All constraints satisfy f_i(x) <= tau (exact).
bool within_level(const std::vector<FunctionExpr>& fs, const QVector& x,
                  const Rational& tau);

// Index of the first constraint with f_i(x) > tau, or nullopt.
std::optional<std::size_t> first_violating(const std::vector<FunctionExpr>& fs,
                                           const QVector& x, const Rational& tau);

struct SeparationResult {
  bool inside = false;
  QVector c;  // ||c||_inf == 1 when !inside
};

}  // namespace conemin
