#include "conemin/ellipsoid.hpp"

#include <Eigen/Dense>

#include <stdexcept>

#include "conemin/rational.hpp"

namespace conemin {

namespace {

// one ascent pass toward the minimum volume enclosing ellipsoid of the
// columns of pts (Khachiyan's barycentric coordinate update)
void mvee_ascent(const Eigen::MatrixXd& pts, int iterations, Eigen::VectorXd& u) {
  const Eigen::Index n = pts.rows();
  const Eigen::Index m = pts.cols();
  Eigen::MatrixXd lifted(n + 1, m);
  lifted.topRows(n) = pts;
  lifted.row(n).setOnes();

  for (int it = 0; it < iterations; ++it) {
    Eigen::MatrixXd X = lifted * u.asDiagonal() * lifted.transpose();
    Eigen::MatrixXd inv_lifted = X.ldlt().solve(lifted);
    Eigen::VectorXd w = (lifted.array() * inv_lifted.array()).colwise().sum();
    Eigen::Index j;
    double wmax = w.maxCoeff(&j);
    double step = (wmax - (n + 1)) / ((n + 1) * (wmax - 1));
    if (!(step > 1e-12)) break;
    u *= (1.0 - step);
    u(j) += step;
  }
}

Rational rationalize(double v, long den = 1 << 30) {
  return Rational(Int(std::llround(v * (double)den)), Int(den));
}

bool positive_definite(const QMatrix& M) {
  for (Eigen::Index k = 1; k <= M.rows(); ++k) {
    if (determinant(M.topLeftCorner(k, k)) <= 0) return false;
  }
  return true;
}

}  // namespace

EllipsoidPair inscribed_loewner_pair(const TrackedPolytope& tp) {
  const Eigen::Index n = tp.dim();
  if (tp.empty() || tp.affine_dim() < n) {
    throw std::invalid_argument("ellipsoid pair needs a full-dimensional body");
  }
  const auto& verts = tp.vertices();
  const HPolytope& P = tp.poly();

  Eigen::MatrixXd pts(n, (Eigen::Index)verts.size());
  for (size_t i = 0; i < verts.size(); ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      pts(j, (Eigen::Index)i) = verts[i].x(j).convert_to<double>();
    }
  }

  QVector centroid = tp.vertex_centroid();

  for (int attempt = 0; attempt < 3; ++attempt) {
    QVector c(n);
    QMatrix shape0(n, n);

    if (attempt < 2) {
      Eigen::VectorXd u = Eigen::VectorXd::Constant(pts.cols(), 1.0 / pts.cols());
      mvee_ascent(pts, 200 * (int)n * (attempt + 1), u);
      Eigen::VectorXd cd = pts * u;
      Eigen::MatrixXd sigma =
          pts * u.asDiagonal() * pts.transpose() - cd * cd.transpose();
      for (Eigen::Index i = 0; i < n; ++i) c(i) = rationalize(cd(i));
      for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j <= i; ++j) {
          Rational v = rationalize(0.5 * (sigma(i, j) + sigma(j, i)));
          shape0(i, j) = v;
          shape0(j, i) = v;
        }
      }
      if (attempt == 1) c = centroid;
      if (!positive_definite(shape0)) continue;
    } else {
      c = centroid;
      shape0 = QMatrix::Identity(n, n);
    }

    // largest homothet of shape0 centered at c inside P, found exactly
    bool interior = true;
    Rational t2;
    bool first = true;
    for (Eigen::Index i = 0; i < P.rows(); ++i) {
      QVector a = P.A.row(i).transpose();
      Rational slack = P.b(i) - a.dot(c);
      if (slack <= 0) {
        interior = false;
        break;
      }
      Rational denom = a.dot(shape0 * a);
      Rational ratio = slack * slack / denom;
      if (first || ratio < t2) {
        t2 = ratio;
        first = false;
      }
    }
    if (!interior || first) continue;

    EllipsoidPair pair;
    pair.center = c;
    pair.shape = shape0 * (t2 * Rational(9801, 10000));

    // certify: inner by per-row support, outer by per-vertex quadratic form
    bool ok = true;
    for (Eigen::Index i = 0; i < P.rows(); ++i) {
      QVector a = P.A.row(i).transpose();
      Rational slack = P.b(i) - a.dot(c);
      if (a.dot(pair.shape * a) > slack * slack) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;
    pair.inner_verified = true;

    QMatrix inv_shape = inverse(pair.shape);
    Rational k2 = 0;
    for (const auto& v : verts) {
      QVector d = v.x - c;
      Rational q = d.dot(inv_shape * d);
      if (q > k2) k2 = q;
    }
    Rational root = sqrt_lower(k2, 64);
    pair.kappa = root * root == k2 ? root : root + Rational(1, Int(1) << 64);
    return pair;
  }

  throw std::runtime_error("ellipsoid pair construction failed to verify");
}

EllipsoidPair inscribed_loewner_pair(const HPolytope& P) {
  auto tp = TrackedPolytope::from_polytope(P);
  if (!tp) throw std::invalid_argument("ellipsoid pair needs a nonempty body");
  return inscribed_loewner_pair(*tp);
}

}  // namespace conemin
