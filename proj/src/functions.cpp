#include "conemin/functions.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace conemin {

namespace {

Rational pow2_inv(unsigned bits) {
  Int d = 1;
  d <<= bits;
  return Rational(1) / Rational(d);
}

}  // namespace

bool is_psd(const QMatrix& S) {
  if (S.rows() != S.cols()) return false;
  QMatrix W = S;
  std::vector<Eigen::Index> live(static_cast<std::size_t>(W.rows()));
  for (std::size_t i = 0; i < live.size(); ++i) live[i] = static_cast<Eigen::Index>(i);

  while (!live.empty()) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < live.size(); ++i)
      if (W(live[i], live[i]) > W(live[best], live[best])) best = i;
    Rational piv = W(live[best], live[best]);
    if (piv < 0) return false;
    if (piv == 0) {
      // all diagonals <= 0 here; PSD forces the whole remainder to vanish
      for (auto r : live)
        for (auto c : live)
          if (W(r, c) != 0) return false;
      return true;
    }
    Eigen::Index k = live[best];
    live.erase(live.begin() + static_cast<std::ptrdiff_t>(best));
    for (auto r : live)
      for (auto c : live) W(r, c) -= W(r, k) * W(k, c) / piv;
  }
  return true;
}

void validate(const FunctionExpr& f, Eigen::Index n) {
  if (const auto* aff = std::get_if<Affine>(&f.node)) {
    if (aff->a.size() != n) throw std::invalid_argument("affine: wrong dimension");
  } else if (const auto* q = std::get_if<Quadratic>(&f.node)) {
    if (q->Q.rows() != n || q->Q.cols() != n || q->a.size() != n)
      throw std::invalid_argument("quadratic: wrong dimension");
    if (q->Q != q->Q.transpose()) throw std::invalid_argument("quadratic: Q not symmetric");
    if (!is_psd(q->Q)) throw std::invalid_argument("quadratic: Q not positive semidefinite");
  } else if (const auto* nm = std::get_if<NormOfAffine>(&f.node)) {
    if (nm->p != 1 && nm->p != 2 && nm->p != kInfNorm)
      throw std::invalid_argument("norm: p must be 1, 2 or inf");
    if (nm->M.cols() != n || nm->v.size() != nm->M.rows())
      throw std::invalid_argument("norm: wrong dimension");
    if (nm->M.rows() == 0) throw std::invalid_argument("norm: empty matrix");
    if (nm->scale < 0) throw std::invalid_argument("norm: negative scale");
  } else if (const auto* mx = std::get_if<MaxExpr>(&f.node)) {
    if (mx->parts.empty()) throw std::invalid_argument("max: no members");
    for (const auto& p : mx->parts) validate(p, n);
  } else {
    const auto& sm = std::get<SumExpr>(f.node);
    if (sm.parts.empty()) throw std::invalid_argument("sum: no members");
    if (sm.weights.size() != sm.parts.size())
      throw std::invalid_argument("sum: weight count mismatch");
    for (const auto& w : sm.weights)
      if (w < 0) throw std::invalid_argument("sum: negative weight");
    for (const auto& p : sm.parts) validate(p, n);
  }
}

Eigen::Index input_dim(const FunctionExpr& f) {
  if (const auto* aff = std::get_if<Affine>(&f.node)) return aff->a.size();
  if (const auto* q = std::get_if<Quadratic>(&f.node)) return q->Q.cols();
  if (const auto* nm = std::get_if<NormOfAffine>(&f.node)) return nm->M.cols();
  if (const auto* mx = std::get_if<MaxExpr>(&f.node))
    return mx->parts.empty() ? 0 : input_dim(mx->parts.front());
  const auto& sm = std::get<SumExpr>(f.node);
  return sm.parts.empty() ? 0 : input_dim(sm.parts.front());
}

SqrtVal eval(const FunctionExpr& f, const QVector& x) {
  if (const auto* aff = std::get_if<Affine>(&f.node)) {
    if (aff->a.size() != x.size()) throw std::invalid_argument("affine: dimension mismatch");
    return SqrtVal(aff->a.dot(x) + aff->b);
  }
  if (const auto* q = std::get_if<Quadratic>(&f.node)) {
    if (q->a.size() != x.size()) throw std::invalid_argument("quadratic: dimension mismatch");
    return SqrtVal(x.dot(q->Q * x) + q->a.dot(x) + q->b);
  }
  if (const auto* nm = std::get_if<NormOfAffine>(&f.node)) {
    if (nm->M.cols() != x.size()) throw std::invalid_argument("norm: dimension mismatch");
    QVector r = nm->M * x + nm->v;
    if (nm->p == 1) {
      Rational s = 0;
      for (Eigen::Index i = 0; i < r.size(); ++i) s += abs(r(i));
      return SqrtVal(nm->scale * s);
    }
    if (nm->p == kInfNorm) {
      Rational s = 0;
      for (Eigen::Index i = 0; i < r.size(); ++i) s = std::max(s, abs(r(i)));
      return SqrtVal(nm->scale * s);
    }
    return SqrtVal(Rational(0), nm->scale, r.dot(r));
  }
  if (const auto* mx = std::get_if<MaxExpr>(&f.node)) {
    SqrtVal best = eval(mx->parts.front(), x);
    for (std::size_t i = 1; i < mx->parts.size(); ++i) {
      SqrtVal v = eval(mx->parts[i], x);
      if (compare(v, best) > 0) best = v;
    }
    return best;
  }
  const auto& sm = std::get<SumExpr>(f.node);
  SqrtVal total{Rational(0)};
  for (std::size_t i = 0; i < sm.parts.size(); ++i) {
    if (sm.weights[i] == 0) continue;
    total = total + eval(sm.parts[i], x).scaled(sm.weights[i]);
  }
  return total;
}

Rational evaluate(const FunctionExpr& f, const QVector& x) {
  SqrtVal v = eval(f, x);
  if (!v.is_rational())
    throw std::domain_error("evaluate: irrational value, use level_leq");
  return v.rational_value();
}

bool level_leq(const FunctionExpr& f, const QVector& x, const Rational& tau) {
  return leq(eval(f, x), tau);
}

QVector subgradient(const FunctionExpr& f, const QVector& x) {
  Subgradient s = subgradient_certified(f, x, Rational(-1));
  if (s.err_l1 != 0)
    throw std::domain_error("subgradient: exact value is irrational");
  return s.g;
}

// err_budget < 0 requests the exact subgradient; err_l1 != 0 in the result
// then signals that exactness is impossible at this point.
Subgradient subgradient_certified(const FunctionExpr& f, const QVector& x,
                                  const Rational& err_budget) {
  if (const auto* aff = std::get_if<Affine>(&f.node)) return {aff->a, Rational(0)};
  if (const auto* q = std::get_if<Quadratic>(&f.node))
    return {QVector(2 * (q->Q * x) + q->a), Rational(0)};
  if (const auto* nm = std::get_if<NormOfAffine>(&f.node)) {
    QVector r = nm->M * x + nm->v;
    if (nm->p == 1) {
      QVector s(r.size());
      for (Eigen::Index i = 0; i < r.size(); ++i) s(i) = Rational(sign(r(i)));
      return {QVector(nm->scale * (nm->M.transpose() * s)), Rational(0)};
    }
    if (nm->p == kInfNorm) {
      Eigen::Index best = 0;
      for (Eigen::Index i = 1; i < r.size(); ++i)
        if (abs(r(i)) > abs(r(best))) best = i;
      if (r(best) == 0) return {QVector::Zero(x.size()), Rational(0)};
      QVector g = nm->M.row(best).transpose() * (nm->scale * Rational(sign(r(best))));
      return {g, Rational(0)};
    }
    Rational sq = r.dot(r);
    if (sq == 0) return {QVector::Zero(x.size()), Rational(0)};
    QVector mr = nm->M.transpose() * r;
    if (auto s = exact_sqrt(sq)) return {QVector(mr * (nm->scale / *s)), Rational(0)};
    if (err_budget < 0) {
      // exact requested but unattainable: report via a sentinel error bound
      return {QVector(mr * nm->scale), Rational(1)};
    }
    Rational mr1 = 0;
    for (Eigen::Index i = 0; i < mr.size(); ++i) mr1 += abs(mr(i));
    if (nm->scale == 0 || mr1 == 0) return {QVector::Zero(x.size()), Rational(0)};
    for (unsigned prec = 64;; prec *= 2) {
      if (prec > (1u << 20)) throw std::runtime_error("subgradient: precision runaway");
      Rational lo = sqrt_lower(sq, prec);
      if (lo == 0) continue;
      Rational hi = lo + pow2_inv(prec);
      Rational err = nm->scale * mr1 * (Rational(1) / lo - Rational(1) / hi);
      if (err <= err_budget) return {QVector(mr * (nm->scale / lo)), err};
    }
  }
  if (const auto* mx = std::get_if<MaxExpr>(&f.node)) {
    std::size_t best = 0;
    SqrtVal bv = eval(mx->parts[0], x);
    for (std::size_t i = 1; i < mx->parts.size(); ++i) {
      SqrtVal v = eval(mx->parts[i], x);
      if (compare(v, bv) > 0) {
        bv = v;
        best = i;
      }
    }
    return subgradient_certified(mx->parts[best], x, err_budget);
  }
  const auto& sm = std::get<SumExpr>(f.node);
  QVector g = QVector::Zero(x.size());
  Rational err = 0;
  std::size_t active = 0;
  for (const auto& w : sm.weights)
    if (w != 0) ++active;
  for (std::size_t i = 0; i < sm.parts.size(); ++i) {
    if (sm.weights[i] == 0) continue;
    Rational part_budget =
        err_budget < 0 ? err_budget
                       : err_budget / (Rational(static_cast<long>(active)) * sm.weights[i]);
    Subgradient s = subgradient_certified(sm.parts[i], x, part_budget);
    g += sm.weights[i] * s.g;
    err += sm.weights[i] * s.err_l1;
  }
  return {g, err};
}

FunctionExpr substitute(const FunctionExpr& f, const QMatrix& A, const QVector& c) {
  if (const auto* aff = std::get_if<Affine>(&f.node))
    return Affine{QVector(A.transpose() * aff->a), aff->a.dot(c) + aff->b};
  if (const auto* q = std::get_if<Quadratic>(&f.node)) {
    QMatrix Qn = A.transpose() * q->Q * A;
    QVector an = A.transpose() * (2 * (q->Q * c) + q->a);
    Rational bn = c.dot(q->Q * c) + q->a.dot(c) + q->b;
    return Quadratic{std::move(Qn), std::move(an), bn};
  }
  if (const auto* nm = std::get_if<NormOfAffine>(&f.node))
    return NormOfAffine{nm->p, QMatrix(nm->M * A), QVector(nm->M * c + nm->v), nm->scale};
  if (const auto* mx = std::get_if<MaxExpr>(&f.node)) {
    MaxExpr out;
    out.parts.reserve(mx->parts.size());
    for (const auto& p : mx->parts) out.parts.push_back(substitute(p, A, c));
    return out;
  }
  const auto& sm = std::get<SumExpr>(f.node);
  SumExpr out;
  out.weights = sm.weights;
  out.parts.reserve(sm.parts.size());
  for (const auto& p : sm.parts) out.parts.push_back(substitute(p, A, c));
  return out;
}

Rational upper_bound_abs(const FunctionExpr& f, const Rational& B) {
  if (const auto* aff = std::get_if<Affine>(&f.node)) {
    Rational s = abs(aff->b);
    for (Eigen::Index i = 0; i < aff->a.size(); ++i) s += abs(aff->a(i)) * B;
    return s;
  }
  if (const auto* q = std::get_if<Quadratic>(&f.node)) {
    Rational s = abs(q->b);
    for (Eigen::Index i = 0; i < q->a.size(); ++i) s += abs(q->a(i)) * B;
    for (Eigen::Index i = 0; i < q->Q.rows(); ++i)
      for (Eigen::Index j = 0; j < q->Q.cols(); ++j) s += abs(q->Q(i, j)) * B * B;
    return s;
  }
  if (const auto* nm = std::get_if<NormOfAffine>(&f.node)) {
    QVector u(nm->M.rows());
    for (Eigen::Index i = 0; i < nm->M.rows(); ++i) {
      Rational s = abs(nm->v(i));
      for (Eigen::Index j = 0; j < nm->M.cols(); ++j) s += abs(nm->M(i, j)) * B;
      u(i) = s;
    }
    if (nm->p == 1) return nm->scale * u.sum();
    if (nm->p == kInfNorm) {
      Rational s = 0;
      for (Eigen::Index i = 0; i < u.size(); ++i) s = std::max(s, u(i));
      return nm->scale * s;
    }
    return SqrtVal(Rational(0), nm->scale, u.dot(u)).upper(32);
  }
  if (const auto* mx = std::get_if<MaxExpr>(&f.node)) {
    Rational s = 0;
    for (const auto& p : mx->parts) s = std::max(s, upper_bound_abs(p, B));
    return s;
  }
  const auto& sm = std::get<SumExpr>(f.node);
  Rational s = 0;
  for (std::size_t i = 0; i < sm.parts.size(); ++i)
    s += sm.weights[i] * upper_bound_abs(sm.parts[i], B);
  return s;
}

double eval_double(const FunctionExpr& f, const Eigen::VectorXd& x) {
  if (const auto* aff = std::get_if<Affine>(&f.node)) {
    double s = aff->b.convert_to<double>();
    for (Eigen::Index i = 0; i < aff->a.size(); ++i)
      s += aff->a(i).convert_to<double>() * x(i);
    return s;
  }
  if (const auto* q = std::get_if<Quadratic>(&f.node)) {
    double s = q->b.convert_to<double>();
    for (Eigen::Index i = 0; i < q->a.size(); ++i) {
      s += q->a(i).convert_to<double>() * x(i);
      for (Eigen::Index j = 0; j < q->a.size(); ++j)
        s += q->Q(i, j).convert_to<double>() * x(i) * x(j);
    }
    return s;
  }
  if (const auto* nm = std::get_if<NormOfAffine>(&f.node)) {
    double acc = 0;
    for (Eigen::Index i = 0; i < nm->M.rows(); ++i) {
      double r = nm->v(i).convert_to<double>();
      for (Eigen::Index j = 0; j < nm->M.cols(); ++j)
        r += nm->M(i, j).convert_to<double>() * x(j);
      if (nm->p == 1)
        acc += std::abs(r);
      else if (nm->p == kInfNorm)
        acc = std::max(acc, std::abs(r));
      else
        acc += r * r;
    }
    if (nm->p == 2) acc = std::sqrt(acc);
    return nm->scale.convert_to<double>() * acc;
  }
  if (const auto* mx = std::get_if<MaxExpr>(&f.node)) {
    double s = eval_double(mx->parts.front(), x);
    for (std::size_t i = 1; i < mx->parts.size(); ++i)
      s = std::max(s, eval_double(mx->parts[i], x));
    return s;
  }
  const auto& sm = std::get<SumExpr>(f.node);
  double s = 0;
  for (std::size_t i = 0; i < sm.parts.size(); ++i)
    s += sm.weights[i].convert_to<double>() * eval_double(sm.parts[i], x);
  return s;
}

std::vector<std::string> validate_instance(const Instance& inst) {
  if (inst.n < 1) throw std::invalid_argument("instance: dimension must be positive");
  if (inst.mixed_continuous < 0)
    throw std::invalid_argument("instance: negative continuous block");
  if (inst.B < 1) throw std::invalid_argument("instance: B must be positive");
  if (inst.Delta < 1) throw std::invalid_argument("instance: Delta must be positive");
  if (inst.M < 1) throw std::invalid_argument("instance: M must be positive");
  if (inst.epsilon <= 0) throw std::invalid_argument("instance: epsilon must be positive");

  Eigen::Index d = inst.total_dim();
  if (inst.objective) validate(*inst.objective, d);
  for (const auto& f : inst.constraints) validate(f, d);

  std::vector<std::string> warnings;
  Rational B(inst.B);
  Rational M(inst.M);
  auto check = [&](const FunctionExpr& f, const std::string& label) {
    Rational ub = upper_bound_abs(f, B);
    if (ub > M)
      warnings.push_back(label + ": interval bound " + to_string(ub) +
                         " exceeds the promised M = " + to_string(M));
  };
  if (inst.objective) check(*inst.objective, "objective");
  for (std::size_t i = 0; i < inst.constraints.size(); ++i)
    check(inst.constraints[i], "constraint " + std::to_string(i));
  return warnings;
}

bool within_level(const std::vector<FunctionExpr>& fs, const QVector& x,
                  const Rational& tau) {
  for (const auto& f : fs)
    if (!level_leq(f, x, tau)) return false;
  return true;
}

std::optional<std::size_t> first_violating(const std::vector<FunctionExpr>& fs,
                                           const QVector& x, const Rational& tau) {
  for (std::size_t i = 0; i < fs.size(); ++i)
    if (!level_leq(fs[i], x, tau)) return i;
  return std::nullopt;
}

}  // namespace conemin
