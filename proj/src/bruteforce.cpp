#include "conemin/bruteforce.hpp"

#include <stdexcept>

namespace conemin {

namespace {

// Calls visit(x) for every integer point of [-B, B]^n in lex order.
template <typename Visit>
void scan_box(Eigen::Index n, const Int& B, Visit&& visit) {
  std::vector<Int> x(static_cast<std::size_t>(n), -B);
  QVector q(n);
  for (;;) {
    for (Eigen::Index i = 0; i < n; ++i) q(i) = Rational(x[static_cast<std::size_t>(i)]);
    visit(q);
    Eigen::Index i = n - 1;
    while (i >= 0 && x[static_cast<std::size_t>(i)] == B) {
      x[static_cast<std::size_t>(i)] = -B;
      --i;
    }
    if (i < 0) return;
    x[static_cast<std::size_t>(i)] += 1;
  }
}

void check_scale(const Instance& inst) {
  if (inst.mixed_continuous > 0)
    throw std::invalid_argument("enumerate: needs a pure integer instance");
  if (inst.n > 4) throw std::invalid_argument("enumerate: dimension cap is 4");
  Int count = 1;
  for (Eigen::Index i = 0; i < inst.n; ++i) count *= 2 * inst.B + 1;
  if (count > 100000000) throw std::invalid_argument("enumerate: box too large to scan");
}

}  // namespace

std::vector<QVector> enumerate(const Instance& inst, const Rational& threshold) {
  check_scale(inst);
  std::vector<QVector> out;
  scan_box(inst.n, inst.B, [&](const QVector& x) {
    if (within_level(inst.constraints, x, threshold)) out.push_back(x);
  });
  return out;
}

EnumerationReport enumerate_report(const Instance& inst) {
  check_scale(inst);
  EnumerationReport rep;
  scan_box(inst.n, inst.B, [&](const QVector& x) {
    if (!within_level(inst.constraints, x, inst.epsilon)) return;
    rep.feasible_eps.push_back(x);
    if (within_level(inst.constraints, x, Rational(0))) rep.feasible0.push_back(x);
    if (inst.objective) {
      SqrtVal v = eval(*inst.objective, x);
      if (!rep.minimum || compare(v, *rep.minimum) < 0) {
        rep.minimum = v;
        rep.minimizer = x;
      }
    }
  });
  return rep;
}

}  // namespace conemin
