#include "conemin/cone.hpp"

#include <stdexcept>

namespace conemin {

TruncatedCone cone_over_base(const QVector& apex, const HPolytope& base,
                             const QVector& normal, const Rational& level) {
  const Rational gap = normal.dot(apex) - level;
  if (gap == 0) throw std::invalid_argument("apex lies on the base plane");

  TruncatedCone cone;
  cone.apex = apex;
  cone.base_normal = normal;
  cone.base_level = level;
  cone.base = base;

  HPolytope lifted(apex.size());
  for (Eigen::Index i = 0; i < base.rows(); ++i) {
    QVector a = base.A.row(i).transpose();
    // hyperplane through the apex and {a'x = b} ∩ plane
    Rational t = (base.b(i) - a.dot(apex)) / gap;
    QVector ell = a + t * normal;
    bool zero = true;
    for (Eigen::Index j = 0; j < ell.size(); ++j) {
      if (ell(j) != 0) {
        zero = false;
        break;
      }
    }
    if (zero) continue;
    lifted.add_row(ell, base.b(i) + t * level);
  }
  if (gap < 0) {
    lifted.add_row(normal, level);
  } else {
    lifted.add_row(QVector(-normal), -level);
  }
  cone.hrep = canonicalize_rows(lifted);
  return cone;
}

}  // namespace conemin
