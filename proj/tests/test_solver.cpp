#include "conemin/solver.hpp"

#include <random>

#include "conemin/bruteforce.hpp"
#include "conemin/cone.hpp"
#include "conemin/oracles.hpp"
#include "doctest.h"

using namespace conemin;

namespace {

Instance make_inst(Eigen::Index n, const Int& B, const Rational& eps) {
  Instance inst;
  inst.n = n;
  inst.B = B;
  inst.Delta = 4;
  inst.M = 1000000;
  inst.epsilon = eps;
  return inst;
}

// (x - center)'(x - center) - r2, over center.size() variables
FunctionExpr ball(const QVector& center, const Rational& r2) {
  const Eigen::Index n = center.size();
  Quadratic q;
  q.Q = QMatrix::Identity(n, n);
  q.a = QVector(n);
  for (Eigen::Index i = 0; i < n; ++i) q.a(i) = -2 * center(i);
  q.b = center.dot(center) - r2;
  return q;
}

FunctionExpr affine(const QVector& a, const Rational& b) { return Affine{a, b}; }

bool same_point(const QVector& a, const QVector& b) {
  if (a.size() != b.size()) return false;
  for (Eigen::Index i = 0; i < a.size(); ++i)
    if (a(i) != b(i)) return false;
  return true;
}

bool sound_feasible(const Instance& inst, const SolveOutcome& out) {
  if (!out.point) return false;
  const QVector& p = *out.point;
  if (p.size() != inst.total_dim()) return false;
  for (Eigen::Index i = 0; i < inst.n; ++i)
    if (!is_integer(p(i))) return false;
  if (linf_norm(p) > Rational(inst.B)) return false;
  return within_level(inst.constraints, p, inst.epsilon);
}

// Random rational in [lo, hi] with denominator den.
Rational rand_rat(std::mt19937& rng, int lo, int hi, int den) {
  std::uniform_int_distribution<int> d(lo * den, hi * den);
  return Rational(d(rng)) / den;
}

SqrtVal min_objective_over(const FunctionExpr& f, const std::vector<QVector>& pts) {
  SqrtVal best = eval(f, pts.front());
  for (std::size_t i = 1; i < pts.size(); ++i) {
    SqrtVal v = eval(f, pts[i]);
    if (compare(v, best) < 0) best = v;
  }
  return best;
}

}  // namespace

TEST_CASE("one dimensional feasibility finds a point of the integer interval") {
  Instance inst = make_inst(1, 5, Rational(1) / 100);
  // x^2 - 9/4: integers within the level set are -1, 0, 1
  Quadratic q;
  q.Q = QMatrix::Identity(1, 1);
  q.a = QVector::Zero(1);
  q.b = Rational(-9) / 4;
  inst.constraints.push_back(q);
  SolveOutcome out = solve_feasibility(inst);
  REQUIRE(out.feasible());
  CHECK(sound_feasible(inst, out));
  CHECK(abs((*out.point)(0)) <= 1);
}

TEST_CASE("a ball missing every integer point is infeasible") {
  Instance inst = make_inst(2, 2, Rational(1) / 100);
  inst.constraints.push_back(ball(make_qvector({Rational(1) / 2, Rational(1) / 2}),
                                  Rational(4) / 25));
  SolveOutcome out = solve_feasibility(inst);
  CHECK(!out.feasible());
}

TEST_CASE("a ball reaching the unit cell corners is feasible") {
  Instance inst = make_inst(2, 2, Rational(1) / 100);
  inst.constraints.push_back(ball(make_qvector({Rational(1) / 2, Rational(1) / 2}),
                                  Rational(16) / 25));
  SolveOutcome out = solve_feasibility(inst);
  REQUIRE(out.feasible());
  CHECK(sound_feasible(inst, out));
  for (Eigen::Index i = 0; i < 2; ++i) {
    CHECK((*out.point)(i) >= 0);
    CHECK((*out.point)(i) <= 1);
  }
}

TEST_CASE("an immediate integer optimum ends a descent without cuts") {
  Instance inst = make_inst(2, 2, Rational(1) / 100);
  inst.constraints.push_back(ball(QVector::Zero(2), 9));
  SolveTrace tr;
  SolverOptions opts;
  opts.trace = &tr;
  SolveOutcome out = solve_feasibility(inst, opts);
  REQUIRE(out.feasible());
  CHECK(tr.cuts.empty());
}

TEST_CASE("accepted cuts shrink the cone volume by the guaranteed factor") {
  // in the plane every accepted cut must keep at most 3/4 of the volume
  std::mt19937 rng(71);
  std::size_t cuts_seen = 0;
  for (int trial = 0; trial < 12; ++trial) {
    Instance inst = make_inst(2, 3, Rational(1) / 100);
    QVector c = make_qvector({rand_rat(rng, -2, 2, 4), rand_rat(rng, -2, 2, 4)});
    if (is_integral(c)) c(0) += Rational(1) / 4;
    inst.constraints.push_back(ball(c, Rational(1) / 30));
    SolveTrace tr;
    SolverOptions opts;
    opts.trace = &tr;
    SolveOutcome out = solve_feasibility(inst, opts);
    if (out.feasible()) CHECK(sound_feasible(inst, out));
    for (const auto& cut : tr.cuts) {
      if (cut.vol_before <= 0) continue;
      ++cuts_seen;
      CHECK(cut.vol_after * 4 <= cut.vol_before * 3);
    }
  }
  CHECK(cuts_seen > 0);
}

TEST_CASE("per facet descent agrees with brute force on the facet cone") {
  std::mt19937 rng(1234);
  const Int B = 3;
  for (int trial = 0; trial < 10; ++trial) {
    Instance inst = make_inst(2, B, Rational(1) / 100);
    QVector c = make_qvector({rand_rat(rng, -2, 2, 4), rand_rat(rng, -2, 2, 4)});
    Rational r2 = rand_rat(rng, 0, 1, 8) + Rational(1) / 30;
    inst.constraints.push_back(ball(c, r2));

    HPolytope cube = HPolytope::cube(2, Rational(B));
    FeasResult fr = feasibility_oracle(cube, inst);
    REQUIRE(!fr.empty());
    const QVector y = *fr.point;
    std::vector<QVector> zero_pts = enumerate(inst, 0);
    Subproblem sub = root_subproblem(inst);

    for (int fid = 0; fid < 4; ++fid) {
      Eigen::Index axis = fid / 2;
      bool upper = fid % 2 == 1;
      Rational level = upper ? Rational(B) : Rational(-B);
      SolverOptions opts;
      opts.strategy = trial % 2 == 0 ? CoverStrategy::Flat : CoverStrategy::Boxes;
      SolveOutcome out = facet_descent(y, axis, upper, sub, opts);
      if (out.feasible()) CHECK(sound_feasible(inst, out));
      if (y(axis) == level) continue;

      QVector nrm = QVector::Zero(2);
      nrm(axis) = 1;
      HPolytope base0 = cube;
      base0.add_equality(nrm, level);
      auto Q0 = TrackedPolytope::from_polytope(base0);
      REQUIRE(Q0.has_value());
      TruncatedCone cone = cone_over_base(y, Q0->poly(), nrm, level);
      bool brute_hit = false;
      for (const auto& z : zero_pts)
        if (cone.hrep.contains(z)) brute_hit = true;
      if (brute_hit) CHECK(out.feasible());
    }
  }
}

TEST_CASE("hyperplane recursion solves the induced lower dimensional problem") {
  Instance inst = make_inst(2, 3, Rational(1) / 100);
  inst.constraints.push_back(ball(QVector::Zero(2), 0));  // placeholder, replaced below

  SUBCASE("points on x1 + x2 = 1 reach the level exactly") {
    Quadratic q;  // (x1 - x2)^2 - 1
    q.Q = QMatrix(2, 2);
    q.Q << 1, -1, -1, 1;
    q.a = QVector::Zero(2);
    q.b = -1;
    inst.constraints[0] = q;
    Subproblem sub = root_subproblem(inst);
    SolveOutcome out =
        recurse_on_hyperplane(sub, Hyperplane{to_integer(make_qvector({1, 1})), 1}, sub.box);
    REQUIRE(out.feasible());
    CHECK(sound_feasible(inst, out));
    CHECK((*out.point)(0) + (*out.point)(1) == 1);
  }

  SUBCASE("the same diagonal form without the shift stays infeasible") {
    Quadratic q;  // (x1 - x2)^2, at least 1 on the hyperplane's integer points
    q.Q = QMatrix(2, 2);
    q.Q << 1, -1, -1, 1;
    q.a = QVector::Zero(2);
    q.b = 0;
    inst.constraints[0] = q;
    Subproblem sub = root_subproblem(inst);
    SolveOutcome out =
        recurse_on_hyperplane(sub, Hyperplane{to_integer(make_qvector({1, 1})), 1}, sub.box);
    CHECK(!out.feasible());
  }

  SUBCASE("a hyperplane off the lattice is rejected by divisibility") {
    inst.constraints[0] = ball(QVector::Zero(2), 100);
    Subproblem sub = root_subproblem(inst);
    SolveOutcome out =
        recurse_on_hyperplane(sub, Hyperplane{to_integer(make_qvector({2, 4})), 1}, sub.box);
    CHECK(!out.feasible());
  }

  SUBCASE("random sections agree with brute force on the hyperplane") {
    std::mt19937 rng(99);
    std::uniform_int_distribution<int> wd(-2, 2), kd(-3, 3);
    for (int trial = 0; trial < 10; ++trial) {
      QVector c = make_qvector({rand_rat(rng, -2, 2, 4), rand_rat(rng, -2, 2, 4)});
      inst.constraints[0] = ball(c, rand_rat(rng, 0, 2, 8) + Rational(1) / 50);
      ZVector w(2);
      w(0) = wd(rng);
      w(1) = wd(rng);
      if (w(0) == 0 && w(1) == 0) w(0) = 1;
      Int k = kd(rng);
      Subproblem sub = root_subproblem(inst);
      SolveOutcome out = recurse_on_hyperplane(sub, Hyperplane{w, k}, sub.box);
      bool brute_hit = false;
      for (const auto& z : enumerate(inst, 0))
        if (to_rational(w).dot(z) == Rational(k)) brute_hit = true;
      if (brute_hit) REQUIRE(out.feasible());
      if (out.feasible()) {
        CHECK(sound_feasible(inst, out));
        CHECK(to_rational(w).dot(*out.point) == Rational(k));
      }
    }
  }
}

TEST_CASE("one dimensional base case rounds the relaxation point") {
  SUBCASE("a level set straddling zero accepts the floor") {
    Instance inst = make_inst(1, 5, Rational(1) / 100);
    QVector c = make_qvector({Rational(2) / 5});
    inst.constraints.push_back(ball(c, Rational(3) / 10));
    SolveOutcome out = base_case_1d(root_subproblem(inst));
    REQUIRE(out.feasible());
    CHECK((*out.point)(0) == 0);
  }

  SUBCASE("a narrow level set between integers is rejected") {
    Instance inst = make_inst(1, 5, Rational(1) / 100);
    QVector c = make_qvector({Rational(1) / 2});
    inst.constraints.push_back(ball(c, Rational(1) / 100));
    SolveOutcome out = base_case_1d(root_subproblem(inst));
    CHECK(!out.feasible());
  }

  SUBCASE("rounding matches a full scan of the interval") {
    std::mt19937 rng(7);
    for (int trial = 0; trial < 10; ++trial) {
      Instance inst = make_inst(1, 4, Rational(1) / 100);
      QVector c = make_qvector({rand_rat(rng, -3, 3, 4)});
      inst.constraints.push_back(ball(c, rand_rat(rng, 0, 1, 16) + Rational(1) / 40));
      SolveOutcome out = base_case_1d(root_subproblem(inst));
      bool brute_hit = !enumerate(inst, 0).empty();
      if (brute_hit) REQUIRE(out.feasible());
      if (out.feasible()) CHECK(sound_feasible(inst, out));
    }
  }
}

TEST_CASE("minimization lands within epsilon of the integer optimum") {
  SUBCASE("a linear constraint pushes the optimum off the origin") {
    Instance inst = make_inst(2, 10, Rational(1) / 10);
    inst.M = 300;
    Quadratic q;
    q.Q = QMatrix::Identity(2, 2);
    q.a = QVector::Zero(2);
    q.b = 0;
    inst.objective = q;
    inst.constraints.push_back(affine(make_qvector({-1, -1}), 3));
    MinimizeOutcome out = minimize(inst);
    REQUIRE(out.feasible());
    CHECK(compare(out.value, Rational(5)) >= 0);
    CHECK(leq(out.value, Rational(5) + Rational(1) / 10));
    CHECK(within_level(inst.constraints, *out.point, inst.epsilon));
  }

  SUBCASE("an unconstrained square bottoms out at zero") {
    Instance inst = make_inst(1, 5, Rational(1) / 10);
    inst.M = 30;
    Quadratic q;
    q.Q = QMatrix::Identity(1, 1);
    q.a = QVector::Zero(1);
    q.b = 0;
    inst.objective = q;
    MinimizeOutcome out = minimize(inst);
    REQUIRE(out.feasible());
    CHECK((*out.point)(0) == 0);
    CHECK(compare(out.value, Rational(0)) == 0);
  }

  SUBCASE("a constraint bounded away from zero is infeasible") {
    Instance inst = make_inst(1, 5, Rational(1) / 10);
    inst.M = 30;
    Quadratic obj;
    obj.Q = QMatrix::Identity(1, 1);
    obj.a = QVector::Zero(1);
    obj.b = 0;
    inst.objective = obj;
    Quadratic q;  // x^2 + 1 stays above every epsilon level
    q.Q = QMatrix::Identity(1, 1);
    q.a = QVector::Zero(1);
    q.b = 1;
    inst.constraints.push_back(q);
    MinimizeOutcome out = minimize(inst);
    CHECK(!out.feasible());
  }

  SUBCASE("random instances stay within epsilon of enumeration") {
    std::mt19937 rng(42);
    for (int trial = 0; trial < 6; ++trial) {
      Instance inst = make_inst(2, 2, Rational(1) / 10);
      inst.M = 10000;
      QVector oc = make_qvector({rand_rat(rng, -1, 1, 4), rand_rat(rng, -1, 1, 4)});
      inst.objective = ball(oc, 0);
      QVector cc = make_qvector({rand_rat(rng, -1, 1, 4), rand_rat(rng, -1, 1, 4)});
      inst.constraints.push_back(ball(cc, Rational(2) + rand_rat(rng, 0, 2, 4)));
      std::vector<QVector> feas0 = enumerate(inst, 0);
      MinimizeOutcome out = minimize(inst);
      if (!feas0.empty()) {
        REQUIRE(out.feasible());
        SqrtVal best = min_objective_over(*inst.objective, feas0);
        CHECK(compare(out.value, best + inst.epsilon) <= 0);
      }
      if (out.feasible()) {
        CHECK(within_level(inst.constraints, *out.point, inst.epsilon));
        CHECK(compare(out.value, eval(*inst.objective, *out.point)) == 0);
      }
    }
  }
}

TEST_CASE("a trailing continuous coordinate is minimized inside each query") {
  SUBCASE("the continuous part absorbs its share of the objective") {
    Instance inst = make_inst(1, 5, Rational(1) / 10);
    inst.M = 100;
    inst.mixed_continuous = 1;
    QVector c = make_qvector({Rational(2) / 5, Rational(7) / 10});
    inst.objective = ball(c, 0);
    MinimizeOutcome out = minimize(inst);
    REQUIRE(out.feasible());
    CHECK((*out.point)(0) == 0);
    CHECK(compare(out.value, Rational(4) / 25) >= 0);
    CHECK(leq(out.value, Rational(4) / 25 + Rational(1) / 10));

    // grid check: integer z, thousandths for the continuous coordinate
    Rational grid_min = Rational(1000000);
    for (Int z = -5; z <= 5; z += 1)
      for (Int k = -1000; k <= 1000; k += 25) {
        QVector p = make_qvector({Rational(z), Rational(k) / 1000});
        Rational v = evaluate(*inst.objective, p);
        if (v < grid_min) grid_min = v;
      }
    CHECK(leq(out.value, grid_min + inst.epsilon));
  }

  SUBCASE("an empty continuous block reduces to plain minimization") {
    Instance inst = make_inst(1, 4, Rational(1) / 10);
    inst.M = 100;
    QVector c = make_qvector({Rational(3) / 4});
    inst.objective = ball(c, 0);
    MinimizeOutcome a = minimize(inst);
    MinimizeOutcome b = mixed_integer_minimize(inst);
    REQUIRE(a.feasible());
    REQUIRE(b.feasible());
    CHECK(same_point(*a.point, *b.point));
    CHECK(compare(a.value, b.value) == 0);
  }

  SUBCASE("an interior continuous optimum is insensitive to the box size") {
    for (Int B : {Int(2), Int(3)}) {
      Instance inst = make_inst(1, B, Rational(1) / 10);
      inst.M = 200;
      inst.mixed_continuous = 1;
      QVector c = make_qvector({Rational(1) / 3, Rational(1) / 4});
      inst.objective = ball(c, 0);
      MinimizeOutcome out = minimize(inst);
      REQUIRE(out.feasible());
      CHECK(compare(out.value, Rational(1) / 9) >= 0);
      CHECK(leq(out.value, Rational(1) / 9 + inst.epsilon));
    }
  }
}

TEST_CASE("feasibility is complete against enumeration at desk scale") {
  std::mt19937 rng(2024);
  for (int trial = 0; trial < 18; ++trial) {
    Eigen::Index n = 1 + trial % 3;
    Int B = n == 3 ? 2 : 3;
    Instance inst = make_inst(n, B, Rational(1) / 100);
    QVector c(n);
    for (Eigen::Index i = 0; i < n; ++i) c(i) = rand_rat(rng, -2, 2, 4);
    inst.constraints.push_back(ball(c, rand_rat(rng, 0, 2, 8) + Rational(1) / 40));
    SolveOutcome out = solve_feasibility(inst);
    EnumerationReport rep = enumerate_report(inst);
    if (!rep.feasible0.empty()) REQUIRE(out.feasible());
    if (out.feasible()) CHECK(sound_feasible(inst, out));
  }
}

TEST_CASE("recorded cuts never discard a zero level integer point") {
  std::mt19937 rng(404);
  const Int B = 3;
  for (int trial = 0; trial < 6; ++trial) {
    Instance inst = make_inst(2, B, Rational(1) / 100);
    QVector c = make_qvector({rand_rat(rng, -2, 2, 4), rand_rat(rng, -2, 2, 4)});
    if (is_integral(c)) c(1) += Rational(1) / 4;
    inst.constraints.push_back(ball(c, Rational(1) / 25));

    HPolytope cube = HPolytope::cube(2, Rational(B));
    FeasResult fr = feasibility_oracle(cube, inst);
    REQUIRE(!fr.empty());
    const QVector y = *fr.point;
    std::vector<QVector> zero_pts = enumerate(inst, 0);

    SolveTrace tr;
    SolverOptions opts;
    opts.trace = &tr;
    SolveOutcome out = solve_feasibility(inst, opts);
    if (out.feasible()) CHECK(sound_feasible(inst, out));

    for (int fid = 0; fid < 4; ++fid) {
      Eigen::Index axis = fid / 2;
      Rational level = fid % 2 == 1 ? Rational(B) : Rational(-B);
      if (y(axis) == level) continue;
      QVector nrm = QVector::Zero(2);
      nrm(axis) = 1;
      HPolytope base0 = cube;
      base0.add_equality(nrm, level);
      auto Q0 = TrackedPolytope::from_polytope(base0);
      REQUIRE(Q0.has_value());
      HPolytope rows = cone_over_base(y, Q0->poly(), nrm, level).hrep;
      for (const auto& cut : tr.cuts) {
        if (cut.depth != 0 || cut.facet != fid) continue;
        for (const auto& z : zero_pts) {
          if (rows.contains(z)) CHECK(cut.normal.dot(z) <= cut.rhs);
        }
        rows.add_row(cut.normal, cut.rhs);
      }
    }
  }
}

TEST_CASE("per facet cut counts grow at most logarithmically with the box") {
  const double c2 = 1.0 / -std::log2(3.0 / 4.0);
  for (Int B : {Int(10), Int(100)}) {
    Instance inst = make_inst(2, B, Rational(1) / 100);
    inst.Delta = 14;
    inst.constraints.push_back(
        ball(make_qvector({Rational(9) / 14, Rational(1) / 2}), Rational(1) / 20));
    SolveTrace tr;
    SolverOptions opts;
    opts.trace = &tr;
    SolveOutcome out = solve_feasibility(inst, opts);
    CHECK(!out.feasible());
    long per_facet[4] = {0, 0, 0, 0};
    for (const auto& cut : tr.cuts)
      if (cut.depth == 0) ++per_facet[cut.facet];
    double bound = 2 * c2 * std::log2(B.convert_to<double>()) + 8;
    for (long count : per_facet) CHECK(double(count) <= bound);
  }
}

TEST_CASE("identical inputs give identical outcomes and trails") {
  Instance inst = make_inst(2, 3, Rational(1) / 100);
  inst.constraints.push_back(ball(make_qvector({Rational(3) / 4, Rational(-1) / 4}),
                                  Rational(1) / 2));

  SolveTrace t1, t2, t3;
  SolverOptions o1, o2, o3;
  o1.trace = &t1;
  o2.trace = &t2;
  o3.trace = &t3;
  o3.parallel = 4;
  SolveOutcome a = solve_feasibility(inst, o1);
  SolveOutcome b = solve_feasibility(inst, o2);
  SolveOutcome c = solve_feasibility(inst, o3);

  REQUIRE(a.feasible() == b.feasible());
  REQUIRE(a.feasible() == c.feasible());
  if (a.feasible()) {
    CHECK(same_point(*a.point, *b.point));
    CHECK(same_point(*a.point, *c.point));
  }
  CHECK(a.trail == b.trail);
  CHECK(a.trail == c.trail);
  CHECK(t1.events == t2.events);
  CHECK(t1.events == t3.events);
  CHECK(t1.cuts.size() == t3.cuts.size());
  CHECK(t1.to_json() == t3.to_json());
}
