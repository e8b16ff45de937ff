#include "conemin/linalg.hpp"

#include <algorithm>

#include "conemin/polytope.hpp"

namespace conemin {

// ---------------------------------------------------------------- Gaussian

namespace {

// Row echelon reduction in place; returns pivot columns. Deterministic:
// picks the first nonzero pivot in row order.
std::vector<Eigen::Index> echelon(QMatrix& m) {
  std::vector<Eigen::Index> pivots;
  Eigen::Index row = 0;
  for (Eigen::Index col = 0; col < m.cols() && row < m.rows(); ++col) {
    Eigen::Index p = -1;
    for (Eigen::Index i = row; i < m.rows(); ++i)
      if (m(i, col) != 0) { p = i; break; }
    if (p < 0) continue;
    if (p != row) m.row(p).swap(m.row(row));
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      if (i == row || m(i, col) == 0) continue;
      Rational f = m(i, col) / m(row, col);
      m.row(i) -= f * m.row(row);
    }
    pivots.push_back(col);
    ++row;
  }
  return pivots;
}

}  // namespace

Eigen::Index rank_of(const QMatrix& m) {
  if (m.rows() == 0 || m.cols() == 0) return 0;
  QMatrix copy = m;
  return static_cast<Eigen::Index>(echelon(copy).size());
}

Rational determinant(const QMatrix& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("determinant: not square");
  QMatrix a = m;
  Rational det(1);
  for (Eigen::Index col = 0; col < a.cols(); ++col) {
    Eigen::Index p = -1;
    for (Eigen::Index i = col; i < a.rows(); ++i)
      if (a(i, col) != 0) { p = i; break; }
    if (p < 0) return Rational(0);
    if (p != col) {
      a.row(p).swap(a.row(col));
      det = -det;
    }
    det *= a(col, col);
    for (Eigen::Index i = col + 1; i < a.rows(); ++i) {
      if (a(i, col) == 0) continue;
      Rational f = a(i, col) / a(col, col);
      a.row(i) -= f * a.row(col);
    }
  }
  return det;
}

std::optional<QVector> solve_linear(const QMatrix& A, const QVector& b) {
  if (A.rows() != b.size()) throw std::invalid_argument("solve_linear: size mismatch");
  QMatrix aug(A.rows(), A.cols() + 1);
  aug.leftCols(A.cols()) = A;
  aug.col(A.cols()) = b;
  auto pivots = echelon(aug);
  // Inconsistent iff a pivot lands in the augmented column.
  if (!pivots.empty() && pivots.back() == A.cols()) return std::nullopt;
  QVector x = QVector::Zero(A.cols());
  for (size_t r = 0; r < pivots.size(); ++r) {
    Eigen::Index c = pivots[r];
    x(c) = aug(static_cast<Eigen::Index>(r), A.cols()) / aug(static_cast<Eigen::Index>(r), c);
  }
  return x;
}

QMatrix inverse(const QMatrix& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("inverse: not square");
  Eigen::Index n = m.rows();
  QMatrix aug(n, 2 * n);
  aug.leftCols(n) = m;
  aug.rightCols(n) = QMatrix::Identity(n, n);
  auto pivots = echelon(aug);
  if (static_cast<Eigen::Index>(pivots.size()) < n || pivots[static_cast<size_t>(n) - 1] >= n)
    throw std::invalid_argument("inverse: singular matrix");
  QMatrix inv(n, n);
  for (Eigen::Index r = 0; r < n; ++r) inv.row(r) = aug.row(r).tail(n) / aug(r, r);
  return inv;
}

QMatrix kernel_basis(const QMatrix& A) {
  QMatrix m = A;
  auto pivots = echelon(m);
  std::vector<bool> is_pivot(static_cast<size_t>(A.cols()), false);
  for (auto c : pivots) is_pivot[static_cast<size_t>(c)] = true;
  Eigen::Index nfree = A.cols() - static_cast<Eigen::Index>(pivots.size());
  QMatrix K(nfree, A.cols());
  Eigen::Index kr = 0;
  for (Eigen::Index free = 0; free < A.cols(); ++free) {
    if (is_pivot[static_cast<size_t>(free)]) continue;
    QVector v = QVector::Zero(A.cols());
    v(free) = 1;
    for (size_t r = 0; r < pivots.size(); ++r) {
      Eigen::Index c = pivots[r];
      v(c) = -m(static_cast<Eigen::Index>(r), free) / m(static_cast<Eigen::Index>(r), c);
    }
    K.row(kr++) = v.transpose();
  }
  return K;
}

Eigen::Index affine_dim(const std::vector<QVector>& points) {
  if (points.empty()) return -1;
  if (points.size() == 1) return 0;
  QMatrix diffs(static_cast<Eigen::Index>(points.size()) - 1, points[0].size());
  for (size_t i = 1; i < points.size(); ++i)
    diffs.row(static_cast<Eigen::Index>(i - 1)) = (points[i] - points[0]).transpose();
  return rank_of(diffs);
}

// ----------------------------------------------------------------- simplex

namespace {

// Dense tableau simplex, Bland's rule throughout, exact arithmetic.
struct Tableau {
  QMatrix t;                 // m rows of constraints; last column is rhs
  std::vector<Eigen::Index> basis;

  Eigen::Index rows() const { return t.rows(); }
  Eigen::Index cols() const { return t.cols() - 1; }

  void pivot(Eigen::Index pr, Eigen::Index pc) {
    t.row(pr) /= t(pr, pc);
    for (Eigen::Index i = 0; i < t.rows(); ++i) {
      if (i == pr || t(i, pc) == 0) continue;
      t.row(i) -= t(i, pc) * t.row(pr);
    }
    basis[static_cast<size_t>(pr)] = pc;
  }
};

// Reduced costs for cost vector c over the current basis.
QVector reduced_costs(const Tableau& tab, const QVector& c, Rational* objective) {
  QVector r = c;
  Rational obj(0);
  for (Eigen::Index i = 0; i < tab.rows(); ++i) {
    const Rational& cb = c(tab.basis[static_cast<size_t>(i)]);
    if (cb == 0) continue;
    r -= cb * tab.t.row(i).head(tab.cols()).transpose();
    obj += cb * tab.t(i, tab.cols());
  }
  if (objective) *objective = obj;
  return r;
}

// Runs Bland-rule simplex to optimality on cost c (columns >= allowed_cols
// never enter). Returns false if unbounded.
bool simplex_min(Tableau& tab, const QVector& c, Eigen::Index allowed_cols) {
  for (;;) {
    QVector red = reduced_costs(tab, c, nullptr);
    Eigen::Index enter = -1;
    for (Eigen::Index j = 0; j < allowed_cols; ++j)
      if (red(j) < 0) { enter = j; break; }
    if (enter < 0) return true;
    Eigen::Index leave = -1;
    Rational best_ratio(0);
    for (Eigen::Index i = 0; i < tab.rows(); ++i) {
      if (tab.t(i, enter) <= 0) continue;
      Rational ratio = tab.t(i, tab.cols()) / tab.t(i, enter);
      if (leave < 0 || ratio < best_ratio ||
          (ratio == best_ratio &&
           tab.basis[static_cast<size_t>(i)] < tab.basis[static_cast<size_t>(leave)])) {
        leave = i;
        best_ratio = ratio;
      }
    }
    if (leave < 0) return false;
    tab.pivot(leave, enter);
  }
}

}  // namespace

LPOutcome lp_solve(const QMatrix& A, const QVector& b, const QVector& objective,
                   LPSense sense) {
  if (A.rows() != b.size() || A.cols() != objective.size())
    throw std::invalid_argument("lp_solve: size mismatch");
  const Eigen::Index m = A.rows();
  const Eigen::Index n = A.cols();
  QVector cmin = sense == LPSense::Min ? objective : QVector(-objective);

  // Equality form: rows flipped so rhs >= 0; variables u, v (x = u - v),
  // slacks, then artificials on flipped rows.
  std::vector<int> flip(static_cast<size_t>(m), 1);
  Eigen::Index nart = 0;
  for (Eigen::Index i = 0; i < m; ++i)
    if (b(i) < 0) { flip[static_cast<size_t>(i)] = -1; ++nart; }

  const Eigen::Index cols = 2 * n + m + nart;
  Tableau tab;
  tab.t = QMatrix::Zero(m, cols + 1);
  tab.basis.resize(static_cast<size_t>(m));
  Eigen::Index art = 2 * n + m;
  for (Eigen::Index i = 0; i < m; ++i) {
    int f = flip[static_cast<size_t>(i)];
    for (Eigen::Index j = 0; j < n; ++j) {
      tab.t(i, j) = f * A(i, j);
      tab.t(i, n + j) = -f * A(i, j);
    }
    tab.t(i, 2 * n + i) = f;
    tab.t(i, cols) = f * b(i);
    if (f < 0) {
      tab.t(i, art) = 1;
      tab.basis[static_cast<size_t>(i)] = art++;
    } else {
      tab.basis[static_cast<size_t>(i)] = 2 * n + i;
    }
  }

  LPOutcome out;
  const Eigen::Index rhs = cols;

  if (nart > 0) {
    QVector phase1 = QVector::Zero(cols);
    for (Eigen::Index j = 2 * n + m; j < cols; ++j) phase1(j) = 1;
    simplex_min(tab, phase1, cols);  // cannot be unbounded: costs >= 0
    Rational sigma;
    QVector red = reduced_costs(tab, phase1, &sigma);
    if (sigma > 0) {
      out.status = LPStatus::Infeasible;
      out.dual = red.segment(2 * n, m);  // Farkas: y >= 0, A'y = 0, b'y = -sigma
      return out;
    }
    // Drive remaining artificials out of the basis; drop dependent rows.
    for (Eigen::Index i = tab.rows(); i-- > 0;) {
      if (tab.basis[static_cast<size_t>(i)] < 2 * n + m) continue;
      Eigen::Index pc = -1;
      for (Eigen::Index j = 0; j < 2 * n + m; ++j)
        if (tab.t(i, j) != 0) { pc = j; break; }
      if (pc >= 0) {
        tab.pivot(i, pc);
        continue;
      }
      // redundant constraint: remove the row
      Eigen::Index nr = tab.rows();
      QMatrix rest(nr - 1, tab.t.cols());
      if (i > 0) rest.topRows(i) = tab.t.topRows(i);
      if (i + 1 < nr) rest.bottomRows(nr - 1 - i) = tab.t.bottomRows(nr - 1 - i);
      tab.t = rest;
      tab.basis.erase(tab.basis.begin() + static_cast<long>(i));
    }
  }

  QVector cost = QVector::Zero(cols);
  cost.head(n) = cmin;
  cost.segment(n, n) = -cmin;
  if (!simplex_min(tab, cost, 2 * n + m)) {
    out.status = LPStatus::Unbounded;
    return out;
  }

  Rational value;
  QVector red = reduced_costs(tab, cost, &value);
  out.status = LPStatus::Optimal;
  out.point = QVector::Zero(n);
  for (Eigen::Index i = 0; i < tab.rows(); ++i) {
    Eigen::Index bv = tab.basis[static_cast<size_t>(i)];
    if (bv < n)
      out.point(bv) += tab.t(i, rhs);
    else if (bv < 2 * n)
      out.point(bv - n) -= tab.t(i, rhs);
  }
  out.value = sense == LPSense::Min ? value : Rational(-value);
  // Multipliers for the minimization form: lambda >= 0, A'lambda = -cmin,
  // -b'lambda = min value. Reduced costs of slack columns.
  out.dual = red.segment(2 * n, m);
  return out;
}

LPOutcome lp_solve(const HPolytope& P, const QVector& objective, LPSense sense) {
  return lp_solve(P.normals(), P.offsets(), objective, sense);
}

// --------------------------------------------------------------------- LLL

ZMatrix lll_reduce_form(const QMatrix& G) {
  const Eigen::Index r = G.rows();
  if (G.cols() != r) throw std::invalid_argument("lll_reduce_form: G not square");
  ZMatrix U = ZMatrix::Identity(r, r);

  auto form = [&](const ZVector& x, const ZVector& y) {
    Rational s(0);
    for (Eigen::Index i = 0; i < r; ++i) {
      if (x(i) == 0) continue;
      Rational xi(x(i));
      for (Eigen::Index j = 0; j < r; ++j)
        if (y(j) != 0) s += xi * G(i, j) * Rational(y(j));
    }
    return s;
  };

  // Gram-Schmidt data for the current rows of U under the form: mu and
  // squared lengths of the orthogonalized vectors, recomputed on demand.
  std::vector<std::vector<Rational>> mu(static_cast<size_t>(r),
                                        std::vector<Rational>(static_cast<size_t>(r)));
  std::vector<Rational> bstar(static_cast<size_t>(r));
  auto recompute = [&]() {
    for (Eigen::Index i = 0; i < r; ++i) {
      Rational norm = form(U.row(i).transpose(), U.row(i).transpose());
      for (Eigen::Index j = 0; j < i; ++j) {
        Rational dot = form(U.row(i).transpose(), U.row(j).transpose());
        for (Eigen::Index l = 0; l < j; ++l)
          dot -= mu[static_cast<size_t>(i)][static_cast<size_t>(l)] *
                 mu[static_cast<size_t>(j)][static_cast<size_t>(l)] * bstar[static_cast<size_t>(l)];
        mu[static_cast<size_t>(i)][static_cast<size_t>(j)] =
            bstar[static_cast<size_t>(j)] == 0 ? Rational(0)
                                               : dot / bstar[static_cast<size_t>(j)];
        norm -= mu[static_cast<size_t>(i)][static_cast<size_t>(j)] *
                mu[static_cast<size_t>(i)][static_cast<size_t>(j)] * bstar[static_cast<size_t>(j)];
      }
      bstar[static_cast<size_t>(i)] = norm;
    }
  };

  recompute();
  const Rational delta(3, 4);
  Eigen::Index k = 1;
  while (k < r) {
    for (Eigen::Index j = k - 1; j >= 0; --j) {
      const Rational& m_kj = mu[static_cast<size_t>(k)][static_cast<size_t>(j)];
      if (abs(m_kj) * 2 > 1) {
        Int q = round_rat(m_kj);
        U.row(k) -= ZMatrix::Scalar(q) * U.row(j);
        recompute();
      }
    }
    Rational lhs = bstar[static_cast<size_t>(k)];
    Rational m = mu[static_cast<size_t>(k)][static_cast<size_t>(k - 1)];
    if (lhs >= (delta - m * m) * bstar[static_cast<size_t>(k - 1)]) {
      ++k;
    } else {
      U.row(k).swap(U.row(k - 1));
      recompute();
      k = std::max<Eigen::Index>(1, k - 1);
    }
  }
  return U;
}

QMatrix lll_reduce(const QMatrix& basis) {
  if (basis.rows() == 0) return basis;
  if (rank_of(basis) != basis.rows())
    throw std::invalid_argument("lll_reduce: dependent rows");
  QMatrix G = basis * basis.transpose();
  ZMatrix U = lll_reduce_form(G);
  return to_rational(U) * basis;
}

// --------------------------------------------------------------------- HNF

HNFResult hermite_normal_form(const ZMatrix& B) {
  const Eigen::Index m = B.rows(), n = B.cols();
  HNFResult res;
  res.H = B;
  res.U = ZMatrix::Identity(m, m);
  ZMatrix& H = res.H;
  ZMatrix& U = res.U;

  Eigen::Index row = 0;
  for (Eigen::Index col = 0; col < n && row < m; ++col) {
    // Clear below (row) in this column by repeated division steps.
    for (;;) {
      Eigen::Index p = -1;
      for (Eigen::Index i = row; i < m; ++i) {
        if (H(i, col) == 0) continue;
        if (p < 0 || abs(H(i, col)) < abs(H(p, col))) p = i;
      }
      if (p < 0) break;
      if (p != row) {
        H.row(p).swap(H.row(row));
        U.row(p).swap(U.row(row));
      }
      bool cleared = true;
      for (Eigen::Index i = row + 1; i < m; ++i) {
        if (H(i, col) == 0) continue;
        Int q = floor_div(H(i, col), H(row, col));
        if (q != 0) {
          H.row(i) -= ZMatrix::Scalar(q) * H.row(row);
          U.row(i) -= ZMatrix::Scalar(q) * U.row(row);
        }
        if (H(i, col) != 0) cleared = false;
      }
      if (cleared) break;
    }
    if (H(row, col) == 0) continue;
    if (H(row, col) < 0) {
      H.row(row) = -H.row(row);
      U.row(row) = -U.row(row);
    }
    for (Eigen::Index i = 0; i < row; ++i) {
      Int q = floor_div(H(i, col), H(row, col));
      if (q != 0) {
        H.row(i) -= ZMatrix::Scalar(q) * H.row(row);
        U.row(i) -= ZMatrix::Scalar(q) * U.row(row);
      }
    }
    ++row;
  }
  res.rank = row;
  return res;
}

bool same_lattice(const ZMatrix& A, const ZMatrix& B) {
  if (A.cols() != B.cols()) return false;
  HNFResult ha = hermite_normal_form(A);
  HNFResult hb = hermite_normal_form(B);
  if (ha.rank != hb.rank) return false;
  return ha.H.topRows(ha.rank) == hb.H.topRows(hb.rank);
}

std::optional<AffineLattice> hnf_solve(const ZVector& w, const Int& k,
                                       const AffineLattice& lattice) {
  const Eigen::Index r = lattice.rank();
  if (w.size() != r) throw std::invalid_argument("hnf_solve: size mismatch");
  if (w.isZero()) throw std::invalid_argument("hnf_solve: zero direction");

  // Unimodular U with U * w = (g, 0, ..., 0)'; from the HNF of w as a column.
  HNFResult h = hermite_normal_form(ZMatrix(w));
  Int g = h.H(0, 0);
  if (k % g != 0) return std::nullopt;
  Int y0 = k / g;

  ZVector z0 = (h.U.row(0) * y0).transpose();
  ZMatrix kernel = h.U.bottomRows(r - 1);

  if (kernel.rows() > 0) {
    // Tidy the presentation: reduce the kernel basis and pull the origin
    // into a fundamental domain so results are small and reproducible.
    QMatrix kq = to_rational(kernel);
    QMatrix G = kq * kq.transpose();
    ZMatrix U2 = lll_reduce_form(G);
    kernel = U2 * kernel;
    for (Eigen::Index i = kernel.rows(); i-- > 0;) {
      ZVector kv = kernel.row(i).transpose();
      Int kk = 0, zk = 0;
      for (Eigen::Index j = 0; j < r; ++j) {
        kk += kv(j) * kv(j);
        zk += z0(j) * kv(j);
      }
      Int q = round_rat(Rational(zk, kk));
      if (q != 0) z0 -= (kv * q);
    }
  }

  AffineLattice out;
  out.origin = lattice.point(z0);
  out.basis = to_rational(kernel) * lattice.basis;
  return out;
}

}  // namespace conemin
