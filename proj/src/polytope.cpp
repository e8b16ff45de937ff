#include "conemin/polytope.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

#include "conemin/rational.hpp"

namespace conemin {

HPolytope::HPolytope(QMatrix normals, QVector offsets)
    : A(std::move(normals)), b(std::move(offsets)) {
  if (A.rows() != b.size()) throw std::invalid_argument("row/offset mismatch");
}

void HPolytope::add_row(const QVector& a, const Rational& beta) {
  if (rows() == 0 && A.cols() == 0) {
    A.resize(0, a.size());
  }
  if (a.size() != A.cols()) throw std::invalid_argument("row dimension mismatch");
  A.conservativeResize(A.rows() + 1, Eigen::NoChange);
  b.conservativeResize(b.size() + 1);
  A.row(A.rows() - 1) = a.transpose();
  b(b.size() - 1) = beta;
}

void HPolytope::add_equality(const QVector& a, const Rational& beta) {
  add_row(a, beta);
  add_row(QVector(-a), -beta);
}

bool HPolytope::contains(const QVector& x) const {
  for (Eigen::Index i = 0; i < rows(); ++i) {
    if (A.row(i).dot(x) > b(i)) return false;
  }
  return true;
}

QVector HPolytope::slacks(const QVector& x) const {
  return b - A * x;
}

HPolytope HPolytope::box(const QVector& lo, const QVector& hi) {
  const Eigen::Index n = lo.size();
  HPolytope P(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    QVector e = QVector::Zero(n);
    e(i) = 1;
    P.add_row(e, hi(i));
    P.add_row(QVector(-e), -lo(i));
  }
  return P;
}

HPolytope HPolytope::cube(Eigen::Index n, const Rational& half_width) {
  QVector lo = QVector::Constant(n, -half_width);
  QVector hi = QVector::Constant(n, half_width);
  return box(lo, hi);
}

HPolytope canonicalize_rows(const HPolytope& P) {
  HPolytope out(P.dim());
  std::vector<std::pair<ZVector, Rational>> seen;
  for (Eigen::Index i = 0; i < P.rows(); ++i) {
    QVector a = P.A.row(i).transpose();
    ZVector prim = primitive_direction(a);
    // scale factor: a = s * prim on the first nonzero entry
    Rational s;
    for (Eigen::Index j = 0; j < a.size(); ++j) {
      if (prim(j) != 0) {
        s = a(j) / Rational(prim(j));
        break;
      }
    }
    if (s == 0) continue;  // zero row: 0 <= b, vacuous or infeasible; keep out
    Rational beta = P.b(i) / s;
    bool dup = false;
    for (const auto& [pa, pb] : seen) {
      if (pa == prim && pb == beta) {
        dup = true;
        break;
      }
    }
    if (dup) continue;
    seen.emplace_back(prim, beta);
    QVector qa(a.size());
    for (Eigen::Index j = 0; j < a.size(); ++j) qa(j) = Rational(prim(j));
    out.add_row(qa, beta);
  }
  return out;
}

namespace {

bool vertex_lex_less(const Vertex& u, const Vertex& v) {
  return lex_less(u.x, v.x);
}

// Exact volume of conv(verts) assumed full-dimensional of dimension d,
// using the face structure encoded in the active sets: rows tight on an
// affinely (k-1)-dimensional subset of a k-face are its facets. Fans each
// face from its lexicographically smallest vertex.
Rational simplex_fan_volume(const std::vector<Vertex>& verts, Eigen::Index d) {
  std::vector<std::vector<Eigen::Index>> simplices;

  // recursive lambda over a subset of vertex indices forming a k-face
  auto recurse = [&](auto&& self, const std::vector<Eigen::Index>& face,
                     Eigen::Index k) -> std::vector<std::vector<Eigen::Index>> {
    if (k == 0) return {{face.front()}};

    Eigen::Index apex = face.front();
    for (Eigen::Index idx : face) {
      if (lex_less(verts[idx].x, verts[apex].x)) apex = idx;
    }

    // group face vertices by rows tight on them
    std::map<Eigen::Index, std::vector<Eigen::Index>> by_row;
    for (Eigen::Index idx : face) {
      for (Eigen::Index r : verts[idx].active) by_row[r].push_back(idx);
    }

    std::set<std::vector<Eigen::Index>> done;
    std::vector<std::vector<Eigen::Index>> out;
    for (auto& [r, sub] : by_row) {
      if ((Eigen::Index)sub.size() < k) continue;
      std::sort(sub.begin(), sub.end());
      if (std::find(sub.begin(), sub.end(), apex) != sub.end()) continue;
      if (done.count(sub)) continue;
      std::vector<QVector> pts;
      pts.reserve(sub.size());
      for (Eigen::Index idx : sub) pts.push_back(verts[idx].x);
      if (affine_dim(pts) != k - 1) continue;
      done.insert(sub);
      for (auto& s : self(self, sub, k - 1)) {
        s.push_back(apex);
        out.push_back(std::move(s));
      }
    }
    return out;
  };

  std::vector<Eigen::Index> all(verts.size());
  for (size_t i = 0; i < verts.size(); ++i) all[i] = (Eigen::Index)i;
  simplices = recurse(recurse, all, d);

  Rational vol = 0;
  Rational fact = 1;
  for (Eigen::Index i = 2; i <= d; ++i) fact *= Rational(i);
  for (const auto& s : simplices) {
    QMatrix M(d, d);
    const QVector& p0 = verts[s.back()].x;
    for (Eigen::Index i = 0; i < d; ++i) {
      M.row(i) = (verts[s[i]].x - p0).transpose();
    }
    Rational det = determinant(M);
    if (det < 0) det = -det;
    vol += det;
  }
  return vol / fact;
}

}  // namespace

TrackedPolytope TrackedPolytope::from_box(const QVector& lo, const QVector& hi) {
  const Eigen::Index n = lo.size();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(lo(i) < hi(i))) throw std::invalid_argument("degenerate box");
  }
  TrackedPolytope tp;
  tp.rows_ = HPolytope::box(lo, hi);
  const Eigen::Index corners = Eigen::Index(1) << n;
  for (Eigen::Index mask = 0; mask < corners; ++mask) {
    Vertex v;
    v.x = QVector(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      v.x(i) = (mask >> i) & 1 ? hi(i) : lo(i);
    }
    tp.verts_.push_back(std::move(v));
  }
  tp.refresh_active_sets();
  return tp;
}

std::optional<TrackedPolytope> TrackedPolytope::from_polytope(const HPolytope& P) {
  auto bb = bounding_box(P);
  if (!bb) return std::nullopt;
  QVector lo = bb->first - QVector::Constant(P.dim(), 1);
  QVector hi = bb->second + QVector::Constant(P.dim(), 1);
  TrackedPolytope tp = from_box(lo, hi);
  for (Eigen::Index i = 0; i < P.rows(); ++i) {
    if (!tp.cut(P.A.row(i).transpose(), P.b(i))) return std::nullopt;
  }
  return tp;
}

void TrackedPolytope::refresh_active_sets() {
  std::sort(verts_.begin(), verts_.end(), vertex_lex_less);
  for (auto& v : verts_) {
    v.active.clear();
    for (Eigen::Index i = 0; i < rows_.rows(); ++i) {
      if (rows_.A.row(i).dot(v.x) == rows_.b(i)) v.active.push_back(i);
    }
  }
}

void TrackedPolytope::prune_rows() {
  // a row stays only while tight on an (affdim-1)-dimensional face; cuts
  // never resurrect redundant rows, so dropping is final
  std::vector<QVector> pts;
  pts.reserve(verts_.size());
  for (const auto& v : verts_) pts.push_back(v.x);
  const Eigen::Index d = conemin::affine_dim(pts);

  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < rows_.rows(); ++i) {
    std::vector<QVector> tight;
    for (const auto& v : verts_) {
      if (std::find(v.active.begin(), v.active.end(), i) != v.active.end()) {
        tight.push_back(v.x);
      }
    }
    if (tight.empty()) continue;
    if (conemin::affine_dim(tight) >= d - 1) keep.push_back(i);
  }
  if ((Eigen::Index)keep.size() == rows_.rows()) return;

  HPolytope next(rows_.dim());
  for (Eigen::Index i : keep) next.add_row(rows_.A.row(i).transpose(), rows_.b(i));
  rows_ = std::move(next);
  refresh_active_sets();
}

bool TrackedPolytope::cut(const QVector& a, const Rational& beta) {
  if (verts_.empty()) return false;

  std::vector<Rational> slack(verts_.size());
  bool any_neg = false, any_zero = false;
  for (size_t i = 0; i < verts_.size(); ++i) {
    slack[i] = beta - a.dot(verts_[i].x);
    if (slack[i] < 0) any_neg = true;
    if (slack[i] == 0) any_zero = true;
  }

  if (!any_neg) {
    if (any_zero) {
      for (Eigen::Index i = 0; i < rows_.rows(); ++i) {
        if (rows_.b(i) == beta && rows_.A.row(i).transpose() == a) return true;
      }
      // touching cut: set unchanged, row may be a new facet
      rows_.add_row(a, beta);
      refresh_active_sets();
      prune_rows();
    }
    return true;
  }

  std::vector<Vertex> next;
  std::vector<QVector> fresh;
  for (size_t i = 0; i < verts_.size(); ++i) {
    if (slack[i] >= 0) next.push_back(verts_[i]);
  }
  const Eigen::Index d = dim();
  for (size_t i = 0; i < verts_.size(); ++i) {
    if (slack[i] >= 0) continue;
    for (size_t j = 0; j < verts_.size(); ++j) {
      if (slack[j] <= 0) continue;
      // candidate edge: endpoints sharing at least d-1 tight rows
      Eigen::Index common = 0;
      for (Eigen::Index r : verts_[i].active) {
        if (std::find(verts_[j].active.begin(), verts_[j].active.end(), r) !=
            verts_[j].active.end()) {
          ++common;
        }
      }
      if (common < d - 1) continue;
      Rational t = slack[i] / (slack[i] - slack[j]);
      QVector x = verts_[i].x + t * (verts_[j].x - verts_[i].x);
      fresh.push_back(std::move(x));
    }
  }

  if (next.empty() && fresh.empty()) {
    verts_.clear();
    rows_ = HPolytope(dim());
    return false;
  }

  rows_.add_row(a, beta);

  // candidates from non-adjacent pairs land inside higher faces; only
  // points whose tight rows reach full rank are vertices
  std::sort(fresh.begin(), fresh.end(),
            [](const QVector& u, const QVector& v) { return lex_less(u, v); });
  fresh.erase(std::unique(fresh.begin(), fresh.end(),
                          [](const QVector& u, const QVector& v) { return u == v; }),
              fresh.end());
  for (auto& x : fresh) {
    bool dup = false;
    for (const auto& v : next) {
      if (v.x == x) {
        dup = true;
        break;
      }
    }
    if (dup) continue;
    std::vector<Eigen::Index> act;
    for (Eigen::Index r = 0; r < rows_.rows(); ++r) {
      if (rows_.A.row(r).dot(x) == rows_.b(r)) act.push_back(r);
    }
    QMatrix M((Eigen::Index)act.size(), d);
    for (size_t r = 0; r < act.size(); ++r) M.row((Eigen::Index)r) = rows_.A.row(act[r]);
    if (rank_of(M) < d) continue;
    Vertex v;
    v.x = std::move(x);
    v.active = std::move(act);
    next.push_back(std::move(v));
  }

  verts_ = std::move(next);
  refresh_active_sets();
  prune_rows();
  return true;
}

QVector TrackedPolytope::vertex_centroid() const {
  if (verts_.empty()) throw std::logic_error("centroid of empty polytope");
  QVector c = QVector::Zero(dim());
  for (const auto& v : verts_) c += v.x;
  return c / Rational((Int)verts_.size());
}

Eigen::Index TrackedPolytope::affine_dim() const {
  std::vector<QVector> pts;
  pts.reserve(verts_.size());
  for (const auto& v : verts_) pts.push_back(v.x);
  return conemin::affine_dim(pts);
}

Rational TrackedPolytope::volume() const {
  if (verts_.empty()) return 0;
  if (affine_dim() < dim()) return 0;
  return simplex_fan_volume(verts_, dim());
}

std::pair<Rational, Rational> TrackedPolytope::extrema(const QVector& dir) const {
  if (verts_.empty()) throw std::logic_error("extrema of empty polytope");
  Rational lo = dir.dot(verts_.front().x);
  Rational hi = lo;
  for (const auto& v : verts_) {
    Rational val = dir.dot(v.x);
    if (val < lo) lo = val;
    if (val > hi) hi = val;
  }
  return {lo, hi};
}

std::vector<QVector> enumerate_vertices(const HPolytope& P) {
  auto tp = TrackedPolytope::from_polytope(P);
  if (!tp) return {};
  std::vector<QVector> out;
  out.reserve(tp->vertices().size());
  for (const auto& v : tp->vertices()) out.push_back(v.x);
  std::sort(out.begin(), out.end(),
            [](const QVector& u, const QVector& v) { return lex_less(u, v); });
  return out;
}

std::vector<QVector> enumerate_vertices_combinatorial(const HPolytope& P) {
  const Eigen::Index n = P.dim();
  const Eigen::Index m = P.rows();
  std::vector<QVector> out;
  if (m < n) return out;

  std::vector<Eigen::Index> idx(n);
  for (Eigen::Index i = 0; i < n; ++i) idx[i] = i;
  while (true) {
    QMatrix M(n, n);
    QVector rhs(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      M.row(i) = P.A.row(idx[i]);
      rhs(i) = P.b(idx[i]);
    }
    if (rank_of(M) == n) {
      auto x = solve_linear(M, rhs);
      if (x && P.contains(*x)) out.push_back(*x);
    }
    // next combination
    Eigen::Index k = n - 1;
    while (k >= 0 && idx[k] == m - n + k) --k;
    if (k < 0) break;
    ++idx[k];
    for (Eigen::Index j = k + 1; j < n; ++j) idx[j] = idx[j - 1] + 1;
  }

  std::sort(out.begin(), out.end(),
            [](const QVector& u, const QVector& v) { return lex_less(u, v); });
  out.erase(std::unique(out.begin(), out.end(),
                        [](const QVector& u, const QVector& v) { return u == v; }),
            out.end());
  return out;
}

bool is_bounded(const HPolytope& P) {
  for (Eigen::Index i = 0; i < P.dim(); ++i) {
    QVector e = QVector::Zero(P.dim());
    e(i) = 1;
    if (lp_solve(P, e, LPSense::Max).status == LPStatus::Unbounded) return false;
    if (lp_solve(P, e, LPSense::Min).status == LPStatus::Unbounded) return false;
  }
  return true;
}

std::optional<std::pair<QVector, QVector>> bounding_box(const HPolytope& P) {
  const Eigen::Index n = P.dim();
  QVector lo(n), hi(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    QVector e = QVector::Zero(n);
    e(i) = 1;
    LPOutcome up = lp_solve(P, e, LPSense::Max);
    if (up.status == LPStatus::Infeasible) return std::nullopt;
    if (up.status == LPStatus::Unbounded) {
      throw std::invalid_argument("unbounded polytope");
    }
    LPOutcome dn = lp_solve(P, e, LPSense::Min);
    if (dn.status != LPStatus::Optimal) {
      throw std::invalid_argument("unbounded polytope");
    }
    hi(i) = up.value;
    lo(i) = dn.value;
  }
  return std::make_pair(lo, hi);
}

namespace {

// facet rows of P over an already-tracked vertex set: tight on an
// (affdim-1)-dimensional subset, or tight everywhere (hull equalities)
std::vector<Eigen::Index> facet_rows(const HPolytope& P,
                                     const std::vector<Vertex>& verts) {
  std::vector<QVector> pts;
  pts.reserve(verts.size());
  for (const auto& v : verts) pts.push_back(v.x);
  const Eigen::Index d = affine_dim(pts);

  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < P.rows(); ++i) {
    std::vector<QVector> tight;
    for (const auto& v : verts) {
      if (P.A.row(i).dot(v.x) == P.b(i)) tight.push_back(v.x);
    }
    if (tight.empty()) continue;
    if (affine_dim(tight) >= d - 1) keep.push_back(i);
  }
  return keep;
}

}  // namespace

HPolytope remove_redundant(const HPolytope& P) {
  auto tp = TrackedPolytope::from_polytope(P);
  if (!tp) throw std::invalid_argument("empty polytope");
  HPolytope out(P.dim());
  for (Eigen::Index i : facet_rows(P, tp->vertices())) {
    out.add_row(P.A.row(i).transpose(), P.b(i));
  }
  return out;
}

HPolytope shrink_polytope(const HPolytope& P, const Int& denominator) {
  if (denominator <= 0) throw std::invalid_argument("nonpositive denominator");
  auto tp = TrackedPolytope::from_polytope(P);
  if (!tp) throw std::invalid_argument("empty polytope");

  HPolytope out(P.dim());
  const Rational den{denominator};
  for (Eigen::Index i : facet_rows(P, tp->vertices())) {
    QVector a = P.A.row(i).transpose();
    Rational lo = a.dot(tp->vertices().front().x);
    for (const auto& v : tp->vertices()) {
      Rational val = a.dot(v.x);
      if (val < lo) lo = val;
    }
    Rational rho = P.b(i) - lo;
    out.add_row(a, P.b(i) - rho / den);
  }
  return out;
}

Rational polytope_volume(const HPolytope& P) {
  auto tp = TrackedPolytope::from_polytope(P);
  if (!tp) return 0;
  return volume_in_affine_hull(*tp);
}

namespace {

// Volume of a flat tracked polytope, reported as the pair (par_vol, gram):
// the true hull volume is par_vol * sqrt(gram). Requires 0 < affine_dim < dim.
void hull_volume_parts(const TrackedPolytope& tp, Rational& par_vol, Rational& gram) {
  const auto& verts = tp.vertices();
  const Eigen::Index n = tp.dim();
  const Eigen::Index d = tp.affine_dim();

  // parametrize the hull: x = v0 + T' t with T rows a basis of differences
  const QVector& v0 = verts.front().x;
  QMatrix diffs((Eigen::Index)verts.size() - 1, n);
  for (size_t i = 1; i < verts.size(); ++i) {
    diffs.row((Eigen::Index)i - 1) = (verts[i].x - v0).transpose();
  }
  // pick d independent rows greedily
  QMatrix T(d, n);
  Eigen::Index got = 0;
  for (Eigen::Index i = 0; i < diffs.rows() && got < d; ++i) {
    T.row(got) = diffs.row(i);
    if (rank_of(T.topRows(got + 1)) == got + 1) ++got;
  }
  if (got < d) throw std::logic_error("affine basis extraction failed");

  QMatrix Tt = T.transpose();
  std::vector<Vertex> mapped(verts.size());
  for (size_t i = 0; i < verts.size(); ++i) {
    auto t = solve_linear(Tt, verts[i].x - v0);
    if (!t) throw std::logic_error("vertex outside affine hull");
    mapped[i].x = *t;
  }

  // rows transform to (T a)' t <= b - a'v0; keep nonzero normals only
  const HPolytope& rows = tp.poly();
  HPolytope flat(d);
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    QVector a = rows.A.row(i).transpose();
    QVector ta = T * a;
    bool zero = true;
    for (Eigen::Index j = 0; j < ta.size(); ++j) {
      if (ta(j) != 0) {
        zero = false;
        break;
      }
    }
    if (zero) continue;
    flat.add_row(ta, rows.b(i) - a.dot(v0));
  }
  for (auto& v : mapped) {
    v.active.clear();
    for (Eigen::Index r = 0; r < flat.rows(); ++r) {
      if (flat.A.row(r).dot(v.x) == flat.b(r)) v.active.push_back(r);
    }
  }
  std::sort(mapped.begin(), mapped.end(), vertex_lex_less);

  par_vol = simplex_fan_volume(mapped, d);
  gram = determinant(T * Tt);
}

}  // namespace

Rational volume_in_affine_hull(const TrackedPolytope& tp) {
  const auto& verts = tp.vertices();
  if (verts.empty()) return 0;
  const Eigen::Index d = tp.affine_dim();
  if (d == 0) return 1;
  if (d == tp.dim()) return simplex_fan_volume(verts, d);
  Rational par_vol, gram;
  hull_volume_parts(tp, par_vol, gram);
  auto root = exact_sqrt(gram);
  if (!root) {
    throw std::domain_error("section measure is irrational for this hull");
  }
  return par_vol * *root;
}

Rational volume_squared_in_affine_hull(const TrackedPolytope& tp) {
  const auto& verts = tp.vertices();
  if (verts.empty()) return 0;
  const Eigen::Index d = tp.affine_dim();
  if (d == 0) return 1;
  if (d == tp.dim()) {
    Rational v = simplex_fan_volume(verts, d);
    return v * v;
  }
  Rational par_vol, gram;
  hull_volume_parts(tp, par_vol, gram);
  return par_vol * par_vol * gram;
}

}  // namespace conemin
