#pragma once

// Ground-truth enumeration over the integer points of the box. Kept
// deliberately dumb: every smarter component is tested against this one.

#include <optional>
#include <vector>

#include "conemin/functions.hpp"

namespace conemin {

struct EnumerationReport {
  std::vector<QVector> feasible0;    // all constraints <= 0
  std::vector<QVector> feasible_eps; // all constraints <= epsilon
  std::optional<SqrtVal> minimum;    // min objective over feasible_eps
  std::optional<QVector> minimizer;  // lex-smallest attaining point
};

// Integer points of [-B, B]^n with every constraint value <= threshold,
// in lexicographic order. Throws when (2B+1)^n exceeds the scale cap.
std::vector<QVector> enumerate(const Instance& inst, const Rational& threshold);

EnumerationReport enumerate_report(const Instance& inst);

}  // namespace conemin
