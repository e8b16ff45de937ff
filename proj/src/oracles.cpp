#include "conemin/oracles.hpp"

#include <functional>
#include <stdexcept>

#include "conemin/linalg.hpp"

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

Rational empty_threshold(const Int& delta, Eigen::Index d) {
  Rational thr = 1;
  Rational inv = Rational(1) / Rational(2 * delta);
  for (Eigen::Index i = 1; i <= d; ++i) thr *= inv / i;
  return thr;
}

}  // namespace

FeasResult feasibility_oracle(const HPolytope& P, const Instance& inst) {
  FeasResult res;
  auto tp = TrackedPolytope::from_polytope(P);
  if (!tp) return res;

  const Eigen::Index d = P.dim();
  const Rational half_eps = inst.epsilon / 2;

  // diameter bound used to absorb certified subgradient error
  Rational reach = 0;
  for (Eigen::Index j = 0; j < d; ++j) {
    QVector axis = QVector::Zero(d);
    axis(j) = 1;
    auto [lo, hi] = tp->extrema(axis);
    reach = std::max(reach, hi - lo);
  }

  auto acceptable = [&](const QVector& x) {
    return P.contains(x) && within_level(inst.constraints, x, half_eps);
  };

  for (int iter = 0; iter < 5000; ++iter) {
    res.iterations = iter + 1;
    if (tp->empty()) return res;
    QVector center = tp->vertex_centroid();

    if (within_level(inst.constraints, center, half_eps)) {
      QVector rounded(d);
      for (Eigen::Index j = 0; j < d; ++j)
        rounded(j) = round_to_denominator(center(j), inst.Delta);
      if (acceptable(rounded)) {
        res.point = rounded;
        return res;
      }
      for (Eigen::Index j = 0; j < d; ++j)
        rounded(j) = rational_approx(center(j), inst.Delta);
      if (acceptable(rounded)) {
        res.point = rounded;
        return res;
      }
      res.point = center;  // exact but possibly finer than Delta
      return res;
    }

    if (reach == 0) return res;  // single infeasible point

    std::size_t worst = 0;
    SqrtVal worst_val = eval(inst.constraints[0], center);
    for (std::size_t i = 1; i < inst.constraints.size(); ++i) {
      SqrtVal v = eval(inst.constraints[i], center);
      if (compare(v, worst_val) > 0) {
        worst_val = v;
        worst = i;
      }
    }

    Rational margin = positive_lower(worst_val - half_eps);
    Subgradient sg =
        subgradient_certified(inst.constraints[worst], center, margin / (2 * reach));
    if (all_zero(sg.g)) return res;  // the worst constraint is minimized here

    // discard {g'x > g'center - margin + err*reach}: every such point keeps
    // the worst constraint above epsilon/2
    Rational rhs = sg.g.dot(center) - margin + sg.err_l1 * reach;
    if (!tp->cut(sg.g, rhs)) return res;

    if (tp->affine_dim() == d) {
      if (tp->volume() < empty_threshold(inst.Delta, d)) {
        res.volume_cutoff = true;
        return res;
      }
    } else {
      Rational thr = empty_threshold(inst.Delta, tp->affine_dim());
      if (volume_squared_in_affine_hull(*tp) < thr * thr) {
        res.volume_cutoff = true;
        return res;
      }
    }
  }
  throw std::runtime_error("feasibility oracle: iteration cap exceeded");
}

SeparationResult separation_oracle(const QMatrix& directions, const QVector& a,
                                   const Instance& inst) {
  if (within_level(inst.constraints, a, inst.epsilon)) return {true, QVector()};
  std::size_t idx = *first_violating(inst.constraints, a, inst.epsilon);

  Rational margin = positive_lower(eval(inst.constraints[idx], a) - inst.epsilon / 2);
  Rational reach = 4 * Rational(inst.B);
  Subgradient sg = subgradient_certified(inst.constraints[idx], a, margin / (2 * reach));

  QVector proj;
  if (directions.rows() == 0) {
    proj = QVector::Zero(a.size());
  } else {
    QMatrix gram = directions * directions.transpose();
    auto coeffs = solve_linear(gram, directions * sg.g);
    if (!coeffs) throw std::runtime_error("separation failed: dependent directions");
    proj = directions.transpose() * *coeffs;
  }
  if (all_zero(proj))
    throw std::runtime_error("separation failed: subgradient orthogonal to the subspace");
  return {false, QVector(proj / linf_norm(proj))};
}

namespace {

// Optimal value of min objective'x over P's integer points, with some
// attaining point; nullopt when there is none.
std::optional<std::pair<Rational, QVector>> ip_value(const HPolytope& P,
                                                     const QVector& objective,
                                                     long& nodes) {
  std::optional<std::pair<Rational, QVector>> best;
  std::function<void(const HPolytope&)> visit = [&](const HPolytope& cur) {
    LPOutcome lp = lp_solve(cur, objective, LPSense::Min);
    if (lp.status == LPStatus::Infeasible) return;
    if (lp.status == LPStatus::Unbounded)
      throw std::invalid_argument("integer optimize: polytope must be bounded");
    ++nodes;
    if (best && lp.value >= best->first) return;

    Eigen::Index frac = -1;
    for (Eigen::Index j = 0; j < lp.point.size(); ++j) {
      if (is_integer(lp.point(j))) continue;
      if (frac < 0 || den(lp.point(j)) > den(lp.point(frac))) frac = j;
    }
    if (frac < 0) {
      best = {lp.value, lp.point};
      return;
    }

    Int fl = floor_rat(lp.point(frac));
    QVector axis = QVector::Zero(cur.dim());
    axis(frac) = 1;
    HPolytope left = cur;
    left.add_row(axis, Rational(fl));
    visit(left);
    HPolytope right = cur;
    right.add_row(QVector(-axis), Rational(-(fl + 1)));
    visit(right);
  };
  visit(P);
  return best;
}

}  // namespace

IPOutcome linear_integer_optimize(const HPolytope& P, const QVector& objective) {
  IPOutcome out;
  auto first = ip_value(P, objective, out.nodes);
  if (!first) return out;
  out.value = first->first;

  // lexicographic refinement over the optimal face
  HPolytope face = P;
  face.add_equality(objective, out.value);
  QVector point = first->second;
  for (Eigen::Index j = 0; j < P.dim(); ++j) {
    QVector axis = QVector::Zero(P.dim());
    axis(j) = 1;
    auto m = ip_value(face, axis, out.nodes);
    if (!m) throw std::logic_error("integer optimize: optimal face lost");
    point(j) = m->first;
    face.add_equality(axis, m->first);
  }
  out.point = point;
  return out;
}

}  // namespace conemin
