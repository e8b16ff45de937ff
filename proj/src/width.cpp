#include "conemin/width.hpp"

#include <stdexcept>
#include <vector>

#include "conemin/linalg.hpp"

namespace conemin {

WidthResult lattice_width(const TrackedPolytope& body, const AffineLattice& lattice) {
  const Eigen::Index r = lattice.rank();
  if (body.empty()) throw std::invalid_argument("width of empty body");

  std::vector<QVector> zs;
  zs.reserve(body.vertices().size());
  for (const auto& v : body.vertices()) {
    auto z = lattice.coordinates(v.x);
    if (!z) throw std::invalid_argument("body leaves the lattice span");
    zs.push_back(std::move(*z));
  }
  if (affine_dim(zs) < r) {
    throw std::invalid_argument("width needs a full-dimensional body");
  }

  QVector mean = QVector::Zero(r);
  for (const auto& z : zs) mean += z;
  mean /= Rational((Int)zs.size());
  QMatrix cov = QMatrix::Zero(r, r);
  for (const auto& z : zs) {
    QVector d = z - mean;
    cov += d * d.transpose();
  }

  ZMatrix U = lll_reduce_form(cov);

  const long bound = 1L << r;
  std::vector<long> k(r, -bound);
  bool have_best = false;
  WidthResult best;

  while (true) {
    ZVector w = ZVector::Zero(r);
    bool zero = true;
    for (Eigen::Index i = 0; i < r; ++i) {
      if (k[i] == 0) continue;
      zero = false;
      for (Eigen::Index j = 0; j < r; ++j) w(j) += Int(k[i]) * U(i, j);
    }
    if (!zero) {
      Int g = gcd_of(w);
      if (g > 1) w /= g;
      w = sign_normalized(w);

      Rational lo, hi;
      bool first = true;
      for (const auto& z : zs) {
        Rational val = 0;
        for (Eigen::Index j = 0; j < r; ++j) val += Rational(w(j)) * z(j);
        if (first) {
          lo = hi = val;
          first = false;
        } else {
          if (val < lo) lo = val;
          if (val > hi) hi = val;
        }
      }
      Rational width = hi - lo;
      if (!have_best || width < best.width ||
          (width == best.width && colex_less(w, best.direction))) {
        best.direction = w;
        best.width = width;
        have_best = true;
      }
    }

    Eigen::Index pos = 0;
    while (pos < r && k[pos] == bound) {
      k[pos] = -bound;
      ++pos;
    }
    if (pos == r) break;
    ++k[pos];
  }

  return best;
}

WidthResult lattice_width(const HPolytope& body, const AffineLattice& lattice) {
  auto tp = TrackedPolytope::from_polytope(body);
  if (!tp) throw std::invalid_argument("width of empty body");
  return lattice_width(*tp, lattice);
}

}  // namespace conemin
