#include "conemin/covering.hpp"

#include <algorithm>
#include <optional>
#include <set>
#include <stdexcept>
#include <utility>
#include <vector>

#include "conemin/ellipsoid.hpp"
#include "conemin/linalg.hpp"
#include "conemin/oracles.hpp"
#include "conemin/width.hpp"

namespace conemin {
namespace {

// Rewrite a'x <= b over x = origin + basis'z into the lattice coordinates z.
HPolytope to_lattice_coords(const HPolytope& P, const AffineLattice& L) {
  HPolytope out(L.rank());
  for (Eigen::Index i = 0; i < P.rows(); ++i) {
    const QVector a = P.A.row(i).transpose();
    out.add_row(L.basis * a, P.b(i) - a.dot(L.origin));
  }
  return out;
}

ZVector canonical_direction(const QVector& q) {
  return sign_normalized(primitive_direction(q));
}

// Normal of the affine hull of a flat vertex set.
ZVector hull_normal(const std::vector<Vertex>& verts) {
  const Eigen::Index r = verts.front().x.size();
  QMatrix diffs = QMatrix::Zero(std::max<Eigen::Index>(
                                    static_cast<Eigen::Index>(verts.size()) - 1, 1),
                                r);
  for (std::size_t i = 1; i < verts.size(); ++i)
    diffs.row(static_cast<Eigen::Index>(i) - 1) =
        (verts[i].x - verts[0].x).transpose();
  const QMatrix K = kernel_basis(diffs);
  if (K.rows() == 0)
    throw std::logic_error("covering: flat body without a hull normal");
  return canonical_direction(K.row(0).transpose());
}

// Integer point with positive slack in every row, when one is cheap to
// find. The search runs over a slightly tightened body so the optimizer
// cannot settle on a boundary vertex; the slacks of the original rows are
// still what certifies interiority.
std::optional<QVector> interior_integer_point(const HPolytope& P) {
  const auto out =
      linear_integer_optimize(shrink_polytope(P, Int(1000000)), QVector::Zero(P.dim()));
  if (!out.point) return std::nullopt;
  const QVector s = P.slacks(*out.point);
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (!(s(i) > 0)) return std::nullopt;
  return out.point;
}

// Every integer level of w'z across the body. Any nonzero integer w is
// sound here; the flat direction just keeps the family small.
void emit_levels(const TrackedPolytope& big, const ZVector& w, CoverReport& rep) {
  const auto range = big.extrema(to_rational(w));
  rep.bound = floor_rat(range.second - range.first) + 1;
  const Int khi = floor_rat(range.second);
  for (Int k = ceil_rat(range.first); k <= khi; ++k)
    rep.hyperplanes.push_back({w, k});
}

// Exact LDL' factorization of a positive definite S, then a rational
// approximation of diag(d)^{-1/2} L^{-1}. The result W satisfies
// W S W' ~ I; only the grid-fit precheck depends on its accuracy.
QMatrix approx_inv_sqrt(const QMatrix& S) {
  const Eigen::Index n = S.rows();
  QMatrix L = QMatrix::Identity(n, n);
  QVector d(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    Rational dj = S(j, j);
    for (Eigen::Index k = 0; k < j; ++k) dj -= L(j, k) * L(j, k) * d(k);
    if (!(dj > 0)) throw std::invalid_argument("approx_inv_sqrt: not positive definite");
    d(j) = dj;
    for (Eigen::Index i = j + 1; i < n; ++i) {
      Rational v = S(i, j);
      for (Eigen::Index k = 0; k < j; ++k) v -= L(i, k) * L(j, k) * d(k);
      L(i, j) = v / dj;
    }
  }
  QMatrix W = inverse(L);
  for (Eigen::Index j = 0; j < n; ++j) {
    unsigned prec = 32;
    Rational s = sqrt_lower(d(j), prec);
    while (s == 0) {
      prec *= 2;
      s = sqrt_lower(d(j), prec);
    }
    const Rational scale = Rational(1) / s;
    for (Eigen::Index c = 0; c < n; ++c) W(j, c) *= scale;
  }
  return W;
}

// Grid-of-boxes construction. Normalizes the inner cone to the cone over
// a near-unit ball at height one with the apex at the origin, lays a
// (1/r^2)-grid over [-2r, 2r)^r, and covers each cell's preimage that can
// meet the outer cone with integer levels of one flat direction. All cells
// are translates of one parallelepiped, so a single direction serves them
// all. Returns false when the normalized outer cone escapes the grid (the
// caller then falls back to the flat construction).
bool boxes_cover(const TrackedPolytope& big_tp, const TruncatedCone& small,
                 const AffineLattice& L, CoverReport& rep) {
  const Eigen::Index r = L.rank();
  if (r < 2) return false;

  // Apex and base plane in lattice coordinates.
  const auto apex = L.coordinates(small.apex);
  if (!apex) return false;
  const QVector y = *apex;
  const QVector h = L.basis * small.base_normal;
  HPolytope base_z = to_lattice_coords(small.base, L);
  base_z.add_equality(h, small.base_level - small.base_normal.dot(L.origin));
  const std::vector<QVector> base_verts = enumerate_vertices(base_z);
  if (base_verts.empty()) return false;

  // Parametrize the base plane as p = p0 + D'u.
  QMatrix hrow(1, r);
  hrow.row(0) = h.transpose();
  const QMatrix D = kernel_basis(hrow);
  if (D.rows() != r - 1) return false;
  const QVector p0 = base_verts.front();

  HPolytope base_u(r - 1);
  for (Eigen::Index i = 0; i < base_z.rows(); ++i) {
    const QVector a = base_z.A.row(i).transpose();
    const QVector da = D * a;
    bool zero = true;
    for (Eigen::Index j = 0; j < da.size(); ++j)
      if (da(j) != 0) {
        zero = false;
        break;
      }
    if (zero) continue;  // rows parallel to the plane
    base_u.add_row(da, base_z.b(i) - a.dot(p0));
  }

  EllipsoidPair pair;
  try {
    pair = inscribed_loewner_pair(base_u);
  } catch (const std::invalid_argument&) {
    return false;  // base degenerate inside its plane
  }
  const QMatrix W = approx_inv_sqrt(pair.shape);
  const QVector q0 = p0 + D.transpose() * pair.center;

  // Frame: z = q0 + D'u + t (y - q0); N maps (u, t) to (W u, 1 - t), so
  // the apex lands on the origin and the base near the unit ball at
  // height one.
  QMatrix C(r, r);
  for (Eigen::Index i = 0; i + 1 < r; ++i) C.col(i) = D.row(i).transpose();
  C.col(r - 1) = y - q0;
  if (determinant(C) == 0) return false;
  QMatrix V = QMatrix::Zero(r, r);
  V.topLeftCorner(r - 1, r - 1) = W;
  V(r - 1, r - 1) = Rational(-1);
  const QMatrix Lmap = V * inverse(C);
  const QMatrix Linv = inverse(Lmap);
  QVector er = QVector::Zero(r);
  er(r - 1) = 1;

  // The outer cone must land inside the grid's footprint.
  const Rational edge(2 * static_cast<long>(r));
  QVector xlo(r), xhi(r);
  bool first = true;
  for (const Vertex& v : big_tp.vertices()) {
    const QVector t = Lmap * (v.x - q0) + er;
    for (Eigen::Index j = 0; j < r; ++j) {
      if (t(j) < -edge || t(j) > edge) return false;
      if (first || t(j) < xlo(j)) xlo(j) = t(j);
      if (first || t(j) > xhi(j)) xhi(j) = t(j);
    }
    first = false;
  }

  // Outer cone rows in grid coordinates, for pruning cells that miss it.
  const HPolytope& Pz = big_tp.poly();
  std::vector<QVector> rho;
  std::vector<Rational> rhs;
  for (Eigen::Index i = 0; i < Pz.rows(); ++i) {
    const QVector a = Pz.A.row(i).transpose();
    const QVector rr = Linv.transpose() * a;
    rho.push_back(rr);
    rhs.push_back(Pz.b(i) - a.dot(q0) + rr(r - 1));
  }

  // All cells share the edge vectors E_j = Linv.col(j) / r^2; pick the
  // lattice direction that makes the common parallelepiped thinnest.
  const Rational cell(Rational(1) / Rational(static_cast<long>(r * r)));
  QMatrix G = QMatrix::Zero(r, r);
  for (Eigen::Index j = 0; j < r; ++j) {
    const QVector ej = Linv.col(j) * cell;
    G += ej * ej.transpose();
  }
  const ZMatrix U = lll_reduce_form(G);
  const long lim = 1L << static_cast<unsigned>(r);
  ZVector w;
  Rational w_width;
  bool have_w = false;
  std::vector<long> kk(static_cast<std::size_t>(r), -lim);
  while (true) {
    ZVector cand = ZVector::Zero(r);
    bool nonzero = false;
    for (Eigen::Index i = 0; i < r; ++i) {
      const long ki = kk[static_cast<std::size_t>(i)];
      if (ki == 0) continue;
      nonzero = true;
      for (Eigen::Index j = 0; j < r; ++j) cand(j) += Int(ki) * U(i, j);
    }
    if (nonzero) {
      const ZVector dir = canonical_direction(to_rational(cand));
      Rational width(0);
      for (Eigen::Index j = 0; j < r; ++j) {
        Rational dot(0);
        for (Eigen::Index i = 0; i < r; ++i)
          dot += Rational(dir(i)) * Linv(i, j) * cell;
        width += dot < 0 ? -dot : dot;
      }
      if (!have_w || width < w_width ||
          (width == w_width && colex_less(dir, w))) {
        w = dir;
        w_width = width;
        have_w = true;
      }
    }
    std::size_t j = 0;
    while (j < kk.size() && kk[j] == lim) kk[j++] = -lim;
    if (j == kk.size()) break;
    ++kk[j];
  }
  if (!have_w) return false;

  const QVector wq = to_rational(w);
  const QVector wL = Linv.transpose() * wq;
  const Rational base_val = wq.dot(q0) - wL(r - 1);
  const auto global = big_tp.extrema(wq);
  const Int kglo = ceil_rat(global.first);
  const Int kghi = floor_rat(global.second);

  // Index windows from the bounding box of the transformed vertices.
  const Rational rr2(static_cast<long>(r * r));
  const Int side = Int(2) * Int(static_cast<long>(r * r * r));
  std::vector<Int> mlo(static_cast<std::size_t>(r)), mhi(static_cast<std::size_t>(r));
  bool window_empty = false;
  for (Eigen::Index j = 0; j < r; ++j) {
    Int lo = floor_rat(xlo(j) * rr2);
    Int hi = floor_rat(xhi(j) * rr2);
    if (lo < -side) lo = -side;
    if (hi > side - 1) hi = side - 1;
    mlo[static_cast<std::size_t>(j)] = lo;
    mhi[static_cast<std::size_t>(j)] = hi;
    if (lo > hi) window_empty = true;
  }

  std::set<Int> ks;
  if (!window_empty) {
    std::vector<Int> m = mlo;
    while (true) {
      QVector clo(r), chi(r);
      for (Eigen::Index j = 0; j < r; ++j) {
        clo(j) = Rational(m[static_cast<std::size_t>(j)]) * cell;
        chi(j) = Rational(m[static_cast<std::size_t>(j)] + 1) * cell;
      }
      bool hit = true;
      for (std::size_t i = 0; i < rho.size(); ++i) {
        Rational low(0);
        for (Eigen::Index j = 0; j < r; ++j)
          low += rho[i](j) >= 0 ? rho[i](j) * clo(j) : rho[i](j) * chi(j);
        if (low > rhs[i]) {
          hit = false;
          break;
        }
      }
      if (hit) {
        Rational lo_val = base_val;
        Rational hi_val = base_val;
        for (Eigen::Index j = 0; j < r; ++j) {
          lo_val += wL(j) >= 0 ? wL(j) * clo(j) : wL(j) * chi(j);
          hi_val += wL(j) >= 0 ? wL(j) * chi(j) : wL(j) * clo(j);
        }
        Int ka = ceil_rat(lo_val);
        Int kb = floor_rat(hi_val);
        if (ka < kglo) ka = kglo;
        if (kb > kghi) kb = kghi;
        for (Int k = ka; k <= kb; ++k) ks.insert(k);
      }
      std::size_t j = 0;
      while (j < m.size() && m[j] == mhi[j]) m[j] = mlo[j], ++j;
      if (j == m.size()) break;
      ++m[j];
    }
  }

  for (const Int& k : ks) rep.hyperplanes.push_back({w, k});
  long cells = 1;
  for (Eigen::Index i = 0; i < r; ++i) cells *= 4 * static_cast<long>(r * r * r);
  rep.boxes_examined = cells;
  rep.bound = Int(cells);
  return true;
}

}  // namespace

CoverReport cover_cone_lattice_points(const TruncatedCone& big,
                                      const TruncatedCone& small,
                                      const AffineLattice& lattice,
                                      CoverStrategy strategy) {
  const Eigen::Index r = lattice.rank();
  if (r == 0 || r != lattice.ambient_dim())
    throw std::invalid_argument("covering: full-rank lattice required");

  CoverReport rep;
  rep.strategy = strategy;

  const auto big_tp = TrackedPolytope::from_polytope(to_lattice_coords(big.hrep, lattice));
  if (!big_tp) return rep;  // empty outer cone, nothing to cover

  const auto small_tp = TrackedPolytope::from_polytope(to_lattice_coords(small.hrep, lattice));

  // A wide inner cone cannot be lattice point free; look for a witness
  // before trusting the caller's certificate.
  std::optional<WidthResult> small_width;
  if (small_tp && small_tp->affine_dim() == r) {
    small_width = lattice_width(*small_tp, AffineLattice::standard(r));
    if (small_width->width > Rational(2 * static_cast<long>(r) + 2)) {
      if (const auto witness = interior_integer_point(small_tp->poly()))
        throw std::runtime_error(
            "covering: inner cone contains the lattice point " + to_string(*witness));
    }
  }

  const auto canonical = [](CoverReport& out) -> CoverReport& {
    std::sort(out.hyperplanes.begin(), out.hyperplanes.end(),
              [](const Hyperplane& a, const Hyperplane& b) {
                if (a.w != b.w) return lex_less(a.w, b.w);
                return a.k < b.k;
              });
    out.hyperplanes.erase(
        std::unique(out.hyperplanes.begin(), out.hyperplanes.end()),
        out.hyperplanes.end());
    return out;
  };

  if (strategy == CoverStrategy::Boxes) {
    if (r > 3)
      throw std::invalid_argument("covering: boxes strategy needs rank <= 3");
    if (small_tp && small_tp->affine_dim() == r &&
        boxes_cover(*big_tp, small, lattice, rep))
      return canonical(rep);
    rep.strategy = CoverStrategy::Flat;  // report what actually ran
    rep.hyperplanes.clear();
  }

  ZVector w;
  if (small_width) {
    w = small_width->direction;
  } else if (small_tp && !small_tp->empty()) {
    w = hull_normal(small_tp->vertices());
  } else if (big_tp->affine_dim() == r) {
    w = lattice_width(*big_tp, AffineLattice::standard(r)).direction;
  } else {
    w = hull_normal(big_tp->vertices());
  }
  emit_levels(*big_tp, w, rep);
  return canonical(rep);
}

}  // namespace conemin
