#include "conemin/solver.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <future>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "conemin/cone.hpp"
#include "conemin/linalg.hpp"
#include "conemin/oracles.hpp"
#include "conemin/width.hpp"

namespace conemin {

namespace {

// Positive rational lower bound on an exactly positive SqrtVal.
Rational positive_lower(const SqrtVal& v) {
  for (unsigned prec = 96;; prec *= 2) {
    if (prec > (1u << 20)) throw std::runtime_error("margin extraction stalled");
    Rational m = v.lower(prec);
    if (m > 0) return m;
  }
}

bool all_zero(const QVector& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (v(i) != 0) return false;
  return true;
}

QVector concat(const QVector& a, const QVector& b) {
  QVector r(a.size() + b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) r(i) = a(i);
  for (Eigen::Index i = 0; i < b.size(); ++i) r(a.size() + i) = b(i);
  return r;
}

ZVector unit_int(Eigen::Index n, Eigen::Index j) {
  ZVector w(n);
  for (Eigen::Index i = 0; i < n; ++i) w(i) = 0;
  w(j) = 1;
  return w;
}

bool is_identity_lattice(const AffineLattice& L) {
  if (L.rank() != L.ambient_dim() || L.origin.size() != L.rank()) return false;
  for (Eigen::Index i = 0; i < L.rank(); ++i) {
    if (L.origin(i) != 0) return false;
    for (Eigen::Index j = 0; j < L.rank(); ++j)
      if (L.basis(i, j) != Rational(i == j ? 1 : 0)) return false;
  }
  return true;
}

// f - t, staying inside the expression algebra.
FunctionExpr level_shifted(const FunctionExpr& f, const Rational& t, Eigen::Index dim) {
  SumExpr s;
  s.parts.push_back(f);
  s.parts.push_back(FunctionExpr(Affine{QVector::Zero(dim), -t}));
  s.weights = {Rational(1), Rational(1)};
  return FunctionExpr(std::move(s));
}

std::string describe(const Hyperplane& H) {
  return to_string(to_rational(H.w)) + "'z = " + H.k.str();
}

struct Ctx {
  const SolverOptions* opts = nullptr;
  SolveTrace* trace = nullptr;
  std::vector<std::string> trail;

  void note(int depth, std::string s) {
    std::string line = "d" + std::to_string(depth) + ": " + std::move(s);
    if (trace) trace->events.push_back(line);
    trail.push_back(std::move(line));
  }
  void count_oracle() {
    if (trace) ++trace->oracle_calls;
  }
  void count_separation() {
    if (trace) ++trace->separation_calls;
  }
  void count_ip() {
    if (trace) ++trace->ip_calls;
  }
  void count_inner() {
    if (trace) ++trace->inner_minimizations;
  }
};

SolveOutcome solve_sub(Ctx& ctx, const Subproblem& sub);

// ---- continuous block plumbing ----

HPolytope with_continuous_block(const HPolytope& Pz, Eigen::Index d, const Int& bound) {
  const Eigen::Index nz = Pz.dim();
  HPolytope full(nz + d);
  for (Eigen::Index r = 0; r < Pz.rows(); ++r) {
    QVector a = QVector::Zero(nz + d);
    for (Eigen::Index j = 0; j < nz; ++j) a(j) = Pz.A(r, j);
    full.add_row(a, Pz.b(r));
  }
  for (Eigen::Index j = 0; j < d; ++j) {
    QVector a = QVector::Zero(nz + d);
    a(nz + j) = 1;
    full.add_row(a, Rational(bound));
    a(nz + j) = -1;
    full.add_row(a, Rational(bound));
  }
  return full;
}

FeasResult call_feasibility(Ctx& ctx, const Subproblem& sub, const HPolytope& Pz) {
  ctx.count_oracle();
  const Instance& inst = sub.instance;
  if (inst.mixed_continuous == 0) return feasibility_oracle(Pz, inst);
  HPolytope full = with_continuous_block(Pz, inst.mixed_continuous, sub.continuous_bound);
  return feasibility_oracle(full, inst);
}

struct InnerMin {
  QVector x;
  SqrtVal value;  // exact value of the worst constraint at (z, x)
};

// Approximately minimize max_i f_i(z, .) over the continuous box, to within
// tol, by bisection on the level; each level test is one cutting-plane run.
InnerMin inner_minimize(const Subproblem& sub, const QVector& z, const Rational& tol) {
  const Instance& inst = sub.instance;
  const Eigen::Index n = inst.n;
  const Eigen::Index d = inst.mixed_continuous;
  const Eigen::Index total = inst.total_dim();

  QMatrix A = QMatrix::Zero(total, d);
  for (Eigen::Index j = 0; j < d; ++j) A(n + j, j) = 1;
  QVector c = QVector::Zero(total);
  for (Eigen::Index i = 0; i < n; ++i) c(i) = z(i);

  std::vector<FunctionExpr> gs;
  gs.reserve(inst.constraints.size());
  for (const auto& f : inst.constraints) gs.push_back(substitute(f, A, c));

  auto worst_at = [&](const QVector& x) {
    SqrtVal w = eval(gs[0], x);
    for (std::size_t i = 1; i < gs.size(); ++i) {
      SqrtVal v = eval(gs[i], x);
      if (compare(v, w) > 0) w = v;
    }
    return w;
  };

  HPolytope cube = HPolytope::cube(d, Rational(sub.continuous_bound));
  QVector best_x = QVector::Zero(d);
  SqrtVal best_v = worst_at(best_x);

  Rational lo = -Rational(inst.M) - 1;
  Rational hi = best_v.upper();
  if (hi <= lo) lo = hi - 1;

  Instance probe;
  probe.n = d;
  probe.B = sub.continuous_bound;
  probe.Delta = inst.Delta;
  probe.M = inst.M;
  probe.epsilon = tol;

  for (int guard = 0; hi - lo > tol / 2; ++guard) {
    if (guard > 400) throw std::runtime_error("inner minimization did not converge");
    Rational t = (lo + hi) / 2;
    probe.constraints.clear();
    for (const auto& g : gs) probe.constraints.push_back(level_shifted(g, t, d));
    FeasResult r = feasibility_oracle(cube, probe);
    if (r.point) {
      SqrtVal v = worst_at(*r.point);
      if (compare(v, best_v) < 0) {
        best_v = v;
        best_x = *r.point;
      }
      hi = t;
    } else {
      lo = t;
    }
  }
  return {best_x, best_v};
}

// An integer-block point under test: mapped back to original coordinates it
// must stay in the original box, and with a continuous block present the
// inner minimization supplies the continuous part of the witness.
struct Probe {
  bool ok = false;
  bool in_range = false;
  QVector full;  // current coordinates, integer block plus continuous block
  std::vector<SqrtVal> values;
  std::optional<InnerMin> inner;
};

Probe probe_point(Ctx& ctx, const Subproblem& sub, const QVector& z) {
  const Instance& inst = sub.instance;
  Probe p;
  ZVector zi = to_integer(z);
  QVector mapped = sub.lattice.point(zi);
  if (linf_norm(mapped) > Rational(sub.continuous_bound)) return p;
  p.in_range = true;

  if (inst.mixed_continuous == 0) {
    p.full = z;
  } else {
    ctx.count_inner();
    InnerMin im = inner_minimize(sub, z, inst.epsilon / 4);
    p.full = concat(z, im.x);
    p.inner = std::move(im);
  }

  p.ok = true;
  p.values.reserve(inst.constraints.size());
  for (const auto& f : inst.constraints) {
    SqrtVal v = eval(f, p.full);
    if (!leq(v, inst.epsilon)) p.ok = false;
    p.values.push_back(v);
  }
  return p;
}

SolveOutcome feasible_outcome(Ctx& ctx, const Subproblem& sub, const Probe& p) {
  const Instance& inst = sub.instance;
  QVector zhead = p.full.head(inst.n);
  QVector zo = sub.lattice.point(to_integer(zhead));
  SolveOutcome out;
  QVector tail(inst.mixed_continuous);
  for (Eigen::Index j = 0; j < inst.mixed_continuous; ++j) tail(j) = p.full(inst.n + j);
  out.point = concat(zo, tail);
  out.values = p.values;
  ctx.note(sub.depth, "feasible at " + to_string(*out.point));
  return out;
}

// Separating halfspace at a rejected integer point z* inside the slice
// {z_axis = z*_axis}, from a certified subgradient of the worst constraint.
// A subgradient orthogonal to the slice proves the slice holds no point
// that is epsilon/2-deep within reach, which callers use to close the
// cone beyond the slice. With a continuous block the subgradient is taken
// jointly at the inner minimizer and the slack the continuous block can
// contribute over its box is subtracted exactly, refining the inner
// tolerance until the margin survives.
struct SliceSep {
  bool empty_slice = false;
  QVector c;  // ||c||_inf == 1, c(axis) == 0, unless empty_slice
};

SliceSep slice_separation(Ctx& ctx, const Subproblem& sub, Eigen::Index axis,
                          const QVector& zstar, Probe& probe,
                          const QVector& lo, const QVector& hi) {
  const Instance& inst = sub.instance;
  const Eigen::Index n = inst.n;
  const Eigen::Index d = inst.mixed_continuous;
  ctx.count_separation();

  const Rational tau = inst.epsilon / 2;
  Rational reach = 1;
  for (Eigen::Index j = 0; j < n; ++j) reach = std::max(reach, hi(j) - lo(j));
  if (d > 0) reach = std::max(reach, 2 * Rational(sub.continuous_bound));

  Rational tol = inst.epsilon / 4;
  std::optional<InnerMin> im;
  if (d > 0) {
    if (probe.inner) {
      im = *probe.inner;
    } else {
      ctx.count_inner();
      im = inner_minimize(sub, zstar, tol);
    }
  }
  for (int attempt = 0;; ++attempt) {
    QVector full = d > 0 ? concat(zstar, im->x) : zstar;
    std::size_t worst = 0;
    SqrtVal wv = eval(inst.constraints[0], full);
    for (std::size_t i = 1; i < inst.constraints.size(); ++i) {
      SqrtVal v = eval(inst.constraints[i], full);
      if (compare(v, wv) > 0) {
        wv = v;
        worst = i;
      }
    }
    SqrtVal margin_sv = wv - tau;
    if (margin_sv.sign() <= 0)
      throw std::logic_error("slice separation called at an acceptable point");
    Rational m = positive_lower(margin_sv);
    Subgradient sg = subgradient_certified(inst.constraints[worst], full, m / (2 * reach));
    QVector gz(n);
    for (Eigen::Index i = 0; i < n; ++i) gz(i) = sg.g(i);
    Rational slack = 0;
    if (d > 0) {
      QVector gx(d);
      for (Eigen::Index j = 0; j < d; ++j) gx(j) = sg.g(n + j);
      slack = Rational(sub.continuous_bound) * l1_norm(gx) + gx.dot(im->x);
    }
    if (2 * slack < m) {
      gz(axis) = 0;
      if (all_zero(gz)) return {true, QVector()};
      return {false, QVector(gz / linf_norm(gz))};
    }
    if (attempt >= 12) throw std::runtime_error("mixed separation did not converge");
    tol = tol / 4;
    ctx.count_inner();
    im = inner_minimize(sub, zstar, tol);
  }
}

// ---- recursion ----

SolveOutcome recurse_hyp(Ctx& ctx, const Subproblem& sub, const Hyperplane& H,
                         const HPolytope& region);

// The cone degenerated into a lower-dimensional set: every integer point of
// it lies on the integer hyperplane carrying its affine hull, if any.
SolveOutcome flat_cone_recursion(Ctx& ctx, const Subproblem& sub,
                                 const std::vector<QVector>& pts, const HPolytope& region) {
  if (pts.empty()) return {};
  const Eigen::Index n = sub.instance.n;
  if (pts.size() == 1) {
    if (is_integral(pts[0])) {
      Probe p = probe_point(ctx, sub, pts[0]);
      if (p.ok) return feasible_outcome(ctx, sub, p);
    }
    ctx.note(sub.depth, "point cone rejected");
    return {};
  }
  QMatrix D(Eigen::Index(pts.size()) - 1, n);
  for (std::size_t i = 1; i < pts.size(); ++i)
    for (Eigen::Index j = 0; j < n; ++j) D(Eigen::Index(i) - 1, j) = pts[i](j) - pts[0](j);
  QMatrix K = kernel_basis(D);
  if (K.rows() == 0) throw std::logic_error("flat recursion on a full-dimensional cone");
  ZVector w = sign_normalized(primitive_direction(K.row(0).transpose()));
  Rational k = to_rational(w).dot(pts[0]);
  if (!is_integer(k)) {
    ctx.note(sub.depth, "degenerate cone's hull misses the lattice");
    return {};
  }
  return recurse_hyp(ctx, sub, Hyperplane{w, num(k)}, region);
}

SolveOutcome base_1d(Ctx& ctx, const Subproblem& sub) {
  auto bb = bounding_box(sub.box);
  if (!bb) {
    ctx.note(sub.depth, "empty interval");
    return {};
  }
  FeasResult fr = call_feasibility(ctx, sub, sub.box);
  if (fr.empty()) {
    ctx.note(sub.depth, fr.volume_cutoff ? "interval relaxation empty (volume cutoff)"
                                         : "interval relaxation empty");
    return {};
  }
  Rational y = (*fr.point)(0);
  Int clo = ceil_rat(bb->first(0));
  Int chi = floor_rat(bb->second(0));
  std::vector<Int> cands{floor_rat(y), ceil_rat(y)};
  if (cands[1] == cands[0]) cands.pop_back();
  for (const Int& k : cands) {
    if (k < clo || k > chi) continue;
    QVector z(1);
    z(0) = Rational(k);
    Probe p = probe_point(ctx, sub, z);
    if (p.ok) return feasible_outcome(ctx, sub, p);
  }
  ctx.note(sub.depth, "both roundings rejected");
  return {};
}

SolveOutcome descend(Ctx& ctx, const Subproblem& sub, const QVector& y,
                     Eigen::Index axis, bool upper, const QVector& lo, const QVector& hi) {
  const Instance& inst = sub.instance;
  const Eigen::Index n = inst.n;
  const int fid = int(2 * axis + (upper ? 1 : 0));
  const int depth = sub.depth;
  const Rational level = upper ? hi(axis) : lo(axis);

  auto tag = [&](const std::string& s) {
    ctx.note(depth, "facet " + std::to_string(fid) + ": " + s);
  };

  QVector plane_normal = QVector::Zero(n);
  plane_normal(axis) = 1;

  if (y(axis) == level) {
    // the cone collapses into the facet plane
    if (!is_integer(level)) {
      tag("facet plane misses the lattice");
      return {};
    }
    tag("apex on the facet plane, restricting to it");
    return recurse_hyp(ctx, sub, Hyperplane{unit_int(n, axis), num(level)}, sub.box);
  }

  HPolytope base0 = sub.box;
  base0.add_equality(plane_normal, level);
  auto Qopt = TrackedPolytope::from_polytope(base0);
  if (!Qopt || Qopt->empty()) {
    tag("facet empty");
    return {};
  }
  TrackedPolytope Q = std::move(*Qopt);

  TruncatedCone cone0 = cone_over_base(y, Q.poly(), plane_normal, level);
  HPolytope Trows = cone0.hrep;  // gains one row per accepted cut

  const Rational sigma = abs(y(axis) - level);
  auto cone_volume = [&]() -> Rational {
    if (Q.empty() || Q.affine_dim() < n - 1) return 0;
    return sigma * volume_in_affine_hull(Q) / n;
  };

  // per-cut factor 1 - 2^-n (n-1)^(1-n), and the 1/n! volume floor
  Int pw = 1;
  for (Eigen::Index i = 0; i < n; ++i) pw *= 2;
  for (Eigen::Index i = 0; i + 1 < n; ++i) pw *= Int(n - 1);
  const Rational factor = Rational(pw - 1) / Rational(pw);
  Int nfact = 1;
  for (Eigen::Index i = 2; i <= n; ++i) nfact *= Int(i);
  const Rational vol_floor = Rational(1) / Rational(nfact);

  Rational vbound = cone_volume();
  long cap = 2 * long(n);
  if (vbound * Rational(nfact) > 1) {
    double ratio = (vbound * Rational(nfact)).convert_to<double>();
    double per_cut = -std::log(factor.convert_to<double>());
    cap += long(std::ceil(std::log(ratio) / per_cut)) + 1;
  }

  QVector h = QVector::Zero(n);
  h(axis) = upper ? 1 : -1;  // points away from the apex: h'y < h'x on the facet

  auto width_exit = [&]() -> SolveOutcome {
    auto Ttp = TrackedPolytope::from_polytope(Trows);
    if (!Ttp || Ttp->empty()) {
      tag("residual cone empty");
      return {};
    }
    if (Ttp->affine_dim() < n) {
      std::vector<QVector> pts;
      for (const auto& v : Ttp->vertices()) pts.push_back(v.x);
      return flat_cone_recursion(ctx, sub, pts, Trows);
    }
    WidthResult wr = lattice_width(*Ttp, AffineLattice::standard(n));
    auto [wlo, whi] = Ttp->extrema(to_rational(wr.direction));
    Int k0 = ceil_rat(wlo);
    Int k1 = floor_rat(whi);
    tag("residual cone reduced along " + to_string(to_rational(wr.direction)));
    for (Int k = k0; k <= k1; k += 1) {
      SolveOutcome out = recurse_hyp(ctx, sub, Hyperplane{wr.direction, k}, Trows);
      if (out.feasible()) return out;
    }
    return {};
  };

  for (long iter = 0;;) {
    if (Q.empty()) {
      tag("base exhausted");
      return {};
    }
    if (Q.affine_dim() < n - 1) {
      tag("base lost a dimension, restricting to its hull");
      std::vector<QVector> pts{y};
      for (const auto& v : Q.vertices()) pts.push_back(v.x);
      return flat_cone_recursion(ctx, sub, pts, Trows);
    }
    if (vbound < vol_floor) {
      tag("volume bound under 1/n!");
      return width_exit();
    }
    if (iter > cap) throw std::runtime_error("facet descent exceeded its iteration bound");

    // the base lives in a hyperplane, so the cut guarantee needs the (n-1)-dimensional shrink
    HPolytope shrunk = shrink_polytope(Q.poly(), Int(4) * Int(n - 1));
    auto Qbar = TrackedPolytope::from_polytope(shrunk);
    if (!Qbar || Qbar->empty()) {
      tag("shrunken base empty");
      return width_exit();
    }
    TruncatedCone tbar = cone_over_base(y, Qbar->poly(), plane_normal, level);

    ctx.count_ip();
    IPOutcome ip = linear_integer_optimize(tbar.hrep, h);

    if (ip.infeasible()) {
      // the inner cone is integer-free: cover the whole cone and recurse
      TruncatedCone tcone = cone_over_base(y, Q.poly(), plane_normal, level);
      CoverReport rep =
          cover_cone_lattice_points(tcone, tbar, AffineLattice::standard(n), ctx.opts->strategy);
      if (ctx.trace) ctx.trace->covers.push_back({depth, rep});
      tag("inner cone integer-free, covered by " + std::to_string(rep.hyperplanes.size()) +
          " hyperplanes");
      for (const auto& hp : rep.hyperplanes) {
        SolveOutcome out = recurse_hyp(ctx, sub, hp, Trows);
        if (out.feasible()) return out;
      }
      return {};
    }

    const QVector& xstar = *ip.point;
    Probe probe = probe_point(ctx, sub, xstar);
    if (probe.ok) {
      tag("integer optimum accepted");
      return feasible_outcome(ctx, sub, probe);
    }

    const Rational kstar = xstar(axis);
    TruncatedCone tcone = cone_over_base(y, Q.poly(), plane_normal, level);
    TruncatedCone tstar = cone_over_base(y, tcone.hrep, plane_normal, kstar);
    TruncatedCone tbar_star = cone_over_base(y, tbar.hrep, plane_normal, kstar);

    SliceSep sep = slice_separation(ctx, sub, axis, xstar, probe, lo, hi);

    // everything on the optimum's apex side of the slice sits in the slice
    // cone pair; cover it and test those hyperplanes before cutting
    CoverReport rep = cover_cone_lattice_points(tstar, tbar_star, AffineLattice::standard(n),
                                                ctx.opts->strategy);
    if (ctx.trace) ctx.trace->covers.push_back({depth, rep});
    tag("slice at level " + to_string(kstar) + " covered by " +
        std::to_string(rep.hyperplanes.size()) + " hyperplanes");
    for (const auto& hp : rep.hyperplanes) {
      SolveOutcome out = recurse_hyp(ctx, sub, hp, tstar.hrep);
      if (out.feasible()) return out;
    }

    if (sep.empty_slice) {
      // the slice holds no deep point at all, so no admissible point of the
      // cone lies beyond it either: the covered part was everything
      tag("slice holds no deep point, cone exhausted");
      return {};
    }

    // lift the in-slice separator to the hyperplane through the apex
    QVector clift = sep.c;
    clift(axis) = -(sep.c.dot(y - xstar)) / (y(axis) - kstar);
    const Rational beta = clift.dot(xstar);

    Rational vb = 0;
    if (ctx.trace) vb = cone_volume();
    bool nonempty = Q.cut(clift, beta);
    Trows.add_row(clift, beta);
    ++iter;
    vbound = vbound * factor;
    if (ctx.trace) {
      Rational va = nonempty ? cone_volume() : Rational(0);
      ctx.trace->cuts.push_back({depth, fid, int(iter), clift, beta, vb, va});
    }
    if (iter % 5 == 0 && nonempty) {
      Rational exact = cone_volume();
      if (exact < vbound) vbound = exact;
    }
  }
}

SolveOutcome recurse_hyp(Ctx& ctx, const Subproblem& sub, const Hyperplane& H,
                         const HPolytope& region) {
  const Instance& inst = sub.instance;
  const Eigen::Index n = inst.n;
  const Eigen::Index d = inst.mixed_continuous;
  ctx.note(sub.depth, "restricting to " + describe(H));

  auto L = hnf_solve(H.w, H.k, AffineLattice::standard(n));
  if (!L) {
    ctx.note(sub.depth, "hyperplane misses the lattice");
    return {};
  }

  if (L->rank() == 0) {
    Probe p = probe_point(ctx, sub, L->origin);
    if (p.ok) return feasible_outcome(ctx, sub, p);
    ctx.note(sub.depth, "hyperplane point rejected");
    return {};
  }

  QMatrix S = lll_reduce(L->basis);
  const Eigen::Index r = S.rows();
  QVector v0 = L->origin;

  // region ∩ {w'z = k} in the new coordinates z = v0 + S' z'
  HPolytope P1(r);
  for (Eigen::Index row = 0; row < region.rows(); ++row) {
    QVector a = region.A.row(row).transpose();
    QVector a2 = S * a;
    Rational b2 = region.b(row) - a.dot(v0);
    if (all_zero(a2)) {
      if (b2 < 0) {
        ctx.note(sub.depth, "region does not meet the hyperplane");
        return {};
      }
      continue;
    }
    P1.add_row(a2, b2);
  }
  auto bb = bounding_box(P1);
  if (!bb) {
    ctx.note(sub.depth, "region does not meet the hyperplane");
    return {};
  }
  ZVector ilo(r), ihi(r);
  for (Eigen::Index j = 0; j < r; ++j) {
    ilo(j) = ceil_rat(bb->first(j));
    ihi(j) = floor_rat(bb->second(j));
    if (ilo(j) > ihi(j)) {
      ctx.note(sub.depth, "slice holds no integer coordinates");
      return {};
    }
  }

  // recenter the parametrization so the new box sits near the origin
  for (Eigen::Index j = 0; j < r; ++j) {
    Int mid = floor_div(ilo(j) + ihi(j), 2);
    for (Eigen::Index i = 0; i < n; ++i) v0(i) += Rational(mid) * S(j, i);
    ilo(j) -= mid;
    ihi(j) -= mid;
  }

  QVector blo(r), bhi(r);
  Int newB = 1;
  for (Eigen::Index j = 0; j < r; ++j) {
    blo(j) = Rational(ilo(j));
    bhi(j) = Rational(ihi(j));
    newB = std::max(newB, abs(ilo(j)));
    newB = std::max(newB, abs(ihi(j)));
  }

  const Eigen::Index total_old = n + d;
  const Eigen::Index total_new = r + d;
  QMatrix A = QMatrix::Zero(total_old, total_new);
  for (Eigen::Index j = 0; j < r; ++j)
    for (Eigen::Index i = 0; i < n; ++i) A(i, j) = S(j, i);
  for (Eigen::Index j = 0; j < d; ++j) A(n + j, r + j) = 1;
  QVector cvec = QVector::Zero(total_old);
  for (Eigen::Index i = 0; i < n; ++i) cvec(i) = v0(i);

  Instance ni = inst;
  ni.n = r;
  ni.B = newB;
  ni.constraints.clear();
  for (const auto& f : inst.constraints) ni.constraints.push_back(substitute(f, A, cvec));
  if (inst.objective) ni.objective = substitute(*inst.objective, A, cvec);

  AffineLattice nl;
  nl.origin = sub.lattice.point(to_integer(v0));
  nl.basis = S * sub.lattice.basis;

  // the original box, affine in the new coordinates: carried as explicit
  // constraints so points that only leave the original box are rejected and
  // separated like any other infeasibility
  const Rational rootB(sub.continuous_bound);
  for (Eigen::Index i = 0; i < nl.ambient_dim(); ++i) {
    QVector a = QVector::Zero(total_new);
    for (Eigen::Index j = 0; j < r; ++j) a(j) = nl.basis(j, i);
    ni.constraints.push_back(Affine{a, nl.origin(i) - rootB});
    QVector neg = QVector::Zero(total_new);
    for (Eigen::Index j = 0; j < r; ++j) neg(j) = -nl.basis(j, i);
    ni.constraints.push_back(Affine{neg, -nl.origin(i) - rootB});
  }

  Subproblem ns;
  ns.instance = std::move(ni);
  ns.lattice = std::move(nl);
  ns.box = HPolytope::box(blo, bhi);
  ns.continuous_bound = sub.continuous_bound;
  ns.depth = sub.depth + 1;
  ns.trail = sub.trail;
  ns.trail.push_back("restricted to " + describe(H));
  return solve_sub(ctx, ns);
}

struct FacetRun {
  SolveOutcome out;
  SolveTrace tr;
  std::vector<std::string> trail;
  std::exception_ptr ep;
};

SolveOutcome solve_sub(Ctx& ctx, const Subproblem& sub) {
  const Instance& inst = sub.instance;
  const Eigen::Index n = inst.n;

  if (n == 0) {
    Probe p = probe_point(ctx, sub, QVector(0));
    if (p.ok) return feasible_outcome(ctx, sub, p);
    ctx.note(sub.depth, "fixed point rejected");
    return {};
  }
  if (n == 1) return base_1d(ctx, sub);

  auto bb = bounding_box(sub.box);
  if (!bb) {
    ctx.note(sub.depth, "empty box");
    return {};
  }
  const QVector lo = bb->first;
  const QVector hi = bb->second;

  for (Eigen::Index axis = 0; axis < n; ++axis) {
    if (lo(axis) != hi(axis)) continue;
    if (!is_integer(lo(axis))) {
      ctx.note(sub.depth, "box flat at a fractional level");
      return {};
    }
    ctx.note(sub.depth, "box flat on axis " + std::to_string(axis));
    return recurse_hyp(ctx, sub, Hyperplane{unit_int(n, axis), num(lo(axis))}, sub.box);
  }

  FeasResult fr = call_feasibility(ctx, sub, sub.box);
  if (fr.empty()) {
    ctx.note(sub.depth, fr.volume_cutoff ? "relaxation empty (volume cutoff)"
                                         : "relaxation empty");
    return {};
  }
  QVector y = fr.point->head(n);
  ctx.note(sub.depth, "relaxed point " + to_string(y));

  const long facets = 2 * long(n);
  const bool threaded = ctx.opts && ctx.opts->parallel > 1 && sub.depth == 0;

  if (!threaded) {
    for (long f = 0; f < facets; ++f) {
      SolveOutcome out = descend(ctx, sub, y, f / 2, f % 2 == 1, lo, hi);
      if (out.feasible()) return out;
    }
    return {};
  }

  // Threaded root: run facets concurrently but select by index order, so
  // the outcome and trace match the sequential schedule exactly.
  std::vector<FacetRun> runs(static_cast<std::size_t>(facets));
  auto run_one = [&](long f) {
    FacetRun fr2;
    Ctx local;
    local.opts = ctx.opts;
    local.trace = &fr2.tr;
    try {
      fr2.out = descend(local, sub, y, f / 2, f % 2 == 1, lo, hi);
    } catch (...) {
      fr2.ep = std::current_exception();
    }
    fr2.trail = std::move(local.trail);
    return fr2;
  };

  long terminal = -1;
  for (long start = 0; start < facets && terminal < 0; ) {
    long end = std::min(facets, start + long(ctx.opts->parallel));
    std::vector<std::future<FacetRun>> futs;
    for (long f = start; f < end; ++f)
      futs.push_back(std::async(std::launch::async, run_one, f));
    for (long f = start; f < end; ++f) runs[std::size_t(f)] = futs[std::size_t(f - start)].get();
    for (long f = 0; f < end; ++f) {
      if (runs[std::size_t(f)].ep || runs[std::size_t(f)].out.feasible()) {
        terminal = f;
        break;
      }
    }
    start = end;
  }

  long last = terminal < 0 ? facets - 1 : terminal;
  for (long f = 0; f <= last; ++f) {
    FacetRun& r = runs[std::size_t(f)];
    for (auto& line : r.trail) ctx.trail.push_back(std::move(line));
    if (ctx.trace) {
      for (auto& c : r.tr.cuts) ctx.trace->cuts.push_back(std::move(c));
      for (auto& c : r.tr.covers) ctx.trace->covers.push_back(std::move(c));
      for (auto& e : r.tr.events) ctx.trace->events.push_back(std::move(e));
      ctx.trace->oracle_calls += r.tr.oracle_calls;
      ctx.trace->separation_calls += r.tr.separation_calls;
      ctx.trace->ip_calls += r.tr.ip_calls;
      ctx.trace->inner_minimizations += r.tr.inner_minimizations;
    }
    if (f == terminal) {
      if (r.ep) std::rethrow_exception(r.ep);
      return std::move(r.out);
    }
  }
  return {};
}

// Recompute every constraint at the returned point and fail loudly if the
// outcome violates its own contract.
void verify_outcome(const Instance& inst, SolveOutcome& out) {
  if (!out.point) return;
  const QVector& p = *out.point;
  if (p.size() != inst.total_dim()) throw std::logic_error("solver returned a malformed point");
  for (Eigen::Index j = 0; j < inst.n; ++j)
    if (!is_integer(p(j))) throw std::logic_error("solver returned a fractional integer block");
  for (Eigen::Index j = 0; j < p.size(); ++j)
    if (abs(p(j)) > Rational(inst.B)) throw std::logic_error("solver left the box");
  out.values.clear();
  for (const auto& f : inst.constraints) {
    SqrtVal v = eval(f, p);
    if (!leq(v, inst.epsilon)) throw std::logic_error("solver returned an infeasible point");
    out.values.push_back(v);
  }
}

}  // namespace

Subproblem root_subproblem(const Instance& inst) {
  validate_instance(inst);
  Subproblem sub;
  sub.instance = inst;
  sub.lattice = AffineLattice::standard(inst.n);
  sub.box = HPolytope::cube(inst.n, Rational(inst.B));
  sub.continuous_bound = inst.B;
  sub.depth = 0;
  return sub;
}

SolveOutcome solve_feasibility(const Instance& inst, const SolverOptions& opts) {
  Subproblem sub = root_subproblem(inst);
  Ctx ctx{&opts, opts.trace, {}};
  SolveOutcome out = solve_sub(ctx, sub);
  out.trail = std::move(ctx.trail);
  verify_outcome(inst, out);
  return out;
}

SolveOutcome solve_feasibility(const Subproblem& sub, const SolverOptions& opts) {
  Ctx ctx{&opts, opts.trace, {}};
  SolveOutcome out = solve_sub(ctx, sub);
  out.trail = std::move(ctx.trail);
  if (is_identity_lattice(sub.lattice)) verify_outcome(sub.instance, out);
  return out;
}

SolveOutcome facet_descent(const QVector& y, Eigen::Index axis, bool upper,
                           const Subproblem& sub, const SolverOptions& opts) {
  if (axis < 0 || axis >= sub.instance.n) throw std::invalid_argument("facet_descent: bad axis");
  if (y.size() != sub.instance.n) throw std::invalid_argument("facet_descent: bad point size");
  auto bb = bounding_box(sub.box);
  if (!bb) throw std::invalid_argument("facet_descent: empty box");
  Ctx ctx{&opts, opts.trace, {}};
  SolveOutcome out = descend(ctx, sub, y, axis, upper, bb->first, bb->second);
  out.trail = std::move(ctx.trail);
  return out;
}

SolveOutcome recurse_on_hyperplane(const Subproblem& sub, const Hyperplane& H,
                                   const HPolytope& region, const SolverOptions& opts) {
  Ctx ctx{&opts, opts.trace, {}};
  SolveOutcome out = recurse_hyp(ctx, sub, H, region);
  out.trail = std::move(ctx.trail);
  return out;
}

SolveOutcome base_case_1d(const Subproblem& sub, const SolverOptions& opts) {
  if (sub.instance.n != 1) throw std::invalid_argument("base_case_1d: dimension must be 1");
  Ctx ctx{&opts, opts.trace, {}};
  SolveOutcome out = base_1d(ctx, sub);
  out.trail = std::move(ctx.trail);
  return out;
}

MinimizeOutcome minimize(const Instance& inst, const SolverOptions& opts) {
  validate_instance(inst);
  if (!inst.objective) throw std::invalid_argument("minimize: instance has no objective");
  const Rational eps = inst.epsilon;

  // Constraints are relaxed by eps/2 and the subcall tolerance is eps/2, so accepted
  // points satisfy f_i <= eps while an infeasible level certifies the eps/2 set empty.
  auto augmented = [&](const Rational& gamma) {
    Instance ai = inst;
    ai.epsilon = eps / 2;
    ai.constraints.clear();
    for (const auto& g : inst.constraints)
      ai.constraints.push_back(level_shifted(g, eps / 2, inst.total_dim()));
    ai.constraints.push_back(level_shifted(*inst.objective, gamma, inst.total_dim()));
    return ai;
  };

  MinimizeOutcome res;
  auto log_step = [&](const Rational& gamma, bool feasible) {
    std::string line = "objective level " + to_string(gamma) +
                       (feasible ? ": feasible" : ": infeasible");
    res.trail.push_back(line);
    if (opts.trace) opts.trace->events.push_back(line);
  };
  auto adopt = [&](const SolveOutcome& out) {
    SqrtVal v = eval(*inst.objective, *out.point);
    if (!res.point || compare(v, res.value) < 0) {
      res.point = out.point;
      res.value = v;
      res.values.clear();
      for (const auto& g : inst.constraints) res.values.push_back(eval(g, *out.point));
    }
  };

  Rational lo = -Rational(inst.M);
  Rational hi = Rational(inst.M);
  SolveOutcome first = solve_feasibility(augmented(hi), opts);
  log_step(hi, first.feasible());
  if (!first.feasible()) {
    for (const auto& line : first.trail) res.trail.push_back(line);
    return res;
  }
  adopt(first);

  while (hi - lo > eps / 2) {
    Rational gamma = (lo + hi) / 2;
    SolveOutcome out = solve_feasibility(augmented(gamma), opts);
    log_step(gamma, out.feasible());
    if (out.feasible()) {
      adopt(out);
      hi = gamma;
    } else {
      lo = gamma;
    }
  }
  return res;
}

MinimizeOutcome mixed_integer_minimize(const Instance& inst, const SolverOptions& opts) {
  return minimize(inst, opts);
}

std::string SolveTrace::to_json() const {
  nlohmann::json j;
  j["oracle_calls"] = oracle_calls;
  j["separation_calls"] = separation_calls;
  j["ip_calls"] = ip_calls;
  j["inner_minimizations"] = inner_minimizations;
  auto cuts_j = nlohmann::json::array();
  for (const auto& c : cuts) {
    cuts_j.push_back({{"depth", c.depth},
                      {"facet", c.facet},
                      {"iteration", c.iteration},
                      {"normal", to_string(c.normal)},
                      {"rhs", to_string(c.rhs)},
                      {"vol_before", to_string(c.vol_before)},
                      {"vol_after", to_string(c.vol_after)}});
  }
  j["cuts"] = cuts_j;
  auto covers_j = nlohmann::json::array();
  for (const auto& c : covers) {
    covers_j.push_back({{"depth", c.depth},
                        {"strategy", c.report.strategy == CoverStrategy::Boxes ? "boxes" : "flat"},
                        {"hyperplanes", c.report.hyperplanes.size()},
                        {"boxes_examined", c.report.boxes_examined},
                        {"bound", c.report.bound.str()}});
  }
  j["covers"] = covers_j;
  j["events"] = events;
  return j.dump(2);
}

}  // namespace conemin
