#include "doctest.h"

#include <optional>
#include <random>
#include <vector>

#include "conemin/cone.hpp"
#include "conemin/covering.hpp"
#include "conemin/oracles.hpp"
#include "conemin/polytope.hpp"
#include "conemin/width.hpp"

using namespace conemin;

namespace {

QVector unit(Eigen::Index n, Eigen::Index j) {
  QVector e = QVector::Zero(n);
  e(j) = 1;
  return e;
}

// Cone from apex to an axis-aligned box over the first n-1 coordinates,
// sitting in the plane x_n = level.
TruncatedCone box_cone(const QVector& apex, const QVector& lo, const QVector& hi,
                       const Rational& level) {
  const Eigen::Index n = apex.size();
  HPolytope base(n);
  for (Eigen::Index j = 0; j + 1 < n; ++j) {
    base.add_row(unit(n, j), hi(j));
    base.add_row(-unit(n, j), -lo(j));
  }
  return cone_over_base(apex, base, unit(n, n - 1), level);
}

// Same, but with the box tightened per the shrink rule before lifting.
TruncatedCone shrunk_box_cone(const QVector& apex, const QVector& lo,
                              const QVector& hi, const Rational& level,
                              const Int& denominator) {
  const Eigen::Index n = apex.size();
  HPolytope base(n);
  for (Eigen::Index j = 0; j + 1 < n; ++j) {
    base.add_row(unit(n, j), hi(j));
    base.add_row(-unit(n, j), -lo(j));
  }
  base.add_equality(unit(n, n - 1), level);
  return cone_over_base(apex, shrink_polytope(base, denominator), unit(n, n - 1),
                        level);
}

bool on_some_plane(const QVector& z, const std::vector<Hyperplane>& hs) {
  for (const Hyperplane& h : hs) {
    Rational s = 0;
    for (Eigen::Index j = 0; j < z.size(); ++j) s += Rational(h.w(j)) * z(j);
    if (s == Rational(h.k)) return true;
  }
  return false;
}

std::vector<QVector> integer_points_in(const HPolytope& P) {
  std::vector<QVector> out;
  const auto bb = bounding_box(P);
  if (!bb) return out;
  const Eigen::Index n = P.dim();
  std::vector<Int> lo(n), hi(n), cur(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    lo[j] = ceil_rat(bb->first(j));
    hi[j] = floor_rat(bb->second(j));
    if (lo[j] > hi[j]) return out;
    cur[j] = lo[j];
  }
  while (true) {
    QVector x(n);
    for (Eigen::Index j = 0; j < n; ++j) x(j) = Rational(cur[j]);
    if (P.contains(x)) out.push_back(x);
    Eigen::Index j = n - 1;
    while (j >= 0 && cur[j] == hi[j]) cur[j] = lo[j], --j;
    if (j < 0) break;
    ++cur[j];
  }
  return out;
}

void check_well_formed(const CoverReport& rep) {
  for (const Hyperplane& h : rep.hyperplanes) {
    bool nonzero = false;
    for (Eigen::Index j = 0; j < h.w.size(); ++j)
      if (h.w(j) != 0) nonzero = true;
    CHECK(nonzero);
    CHECK(gcd_of(h.w) == 1);
  }
  for (std::size_t i = 1; i < rep.hyperplanes.size(); ++i) {
    const Hyperplane& a = rep.hyperplanes[i - 1];
    const Hyperplane& b = rep.hyperplanes[i];
    const bool ordered =
        lex_less(a.w, b.w) || (a.w == b.w && a.k < b.k);
    CHECK(ordered);
  }
  CHECK(Int(static_cast<long>(rep.hyperplanes.size())) <= rep.bound);
}

// Coverage of big's integer points by the report, in the given lattice's
// coordinates. Returns how many points were checked.
int check_coverage(const CoverReport& rep, const TruncatedCone& big,
                   const AffineLattice& lattice) {
  int checked = 0;
  for (const QVector& p : integer_points_in(big.hrep)) {
    const auto z = lattice.coordinates(p);
    REQUIRE(z.has_value());
    if (!is_integral(*z)) continue;  // ambient integer point off this lattice
    CHECK(on_some_plane(*z, rep.hyperplanes));
    ++checked;
  }
  return checked;
}

}  // namespace

TEST_CASE("cone without lattice points accepts an empty family") {
  const QVector apex = make_qvector({Rational(1, 2), Rational(1, 2)});
  const QVector lo = make_qvector({Rational(1, 3), Rational(0)});
  const QVector hi = make_qvector({Rational(2, 5), Rational(0)});
  const TruncatedCone cone = box_cone(apex, lo, hi, Rational(1));

  const auto rep = cover_cone_lattice_points(cone, cone, AffineLattice::standard(2),
                                             CoverStrategy::Flat);
  CHECK(rep.hyperplanes.empty());
  CHECK(rep.strategy == CoverStrategy::Flat);
  check_well_formed(rep);
  CHECK(check_coverage(rep, cone, AffineLattice::standard(2)) == 0);
}

TEST_CASE("thin plane cone gets covered after certification") {
  const QVector apex = make_qvector({Rational(1, 2), Rational(1, 2)});
  const QVector lo = make_qvector({Rational(13, 10), Rational(0)});
  const QVector hi = make_qvector({Rational(17, 10), Rational(0)});
  const TruncatedCone big = box_cone(apex, lo, hi, Rational(3));
  const TruncatedCone small = shrunk_box_cone(apex, lo, hi, Rational(3), Int(8));

  // the shrunk cone really is free of lattice points
  CHECK(linear_integer_optimize(small.hrep, QVector::Zero(2)).infeasible());

  // scan of [-5,5] x [0,3] finds the outer cone's points; (1,2) is one
  const auto pts = integer_points_in(big.hrep);
  REQUIRE(!pts.empty());
  bool saw = false;
  for (const auto& p : pts)
    if (p == make_qvector({1, 2})) saw = true;
  CHECK(saw);

  for (const auto strategy : {CoverStrategy::Flat, CoverStrategy::Boxes}) {
    const auto rep =
        cover_cone_lattice_points(big, small, AffineLattice::standard(2), strategy);
    check_well_formed(rep);
    CHECK(check_coverage(rep, big, AffineLattice::standard(2)) ==
          static_cast<int>(pts.size()));
  }
}

TEST_CASE("plane box grid has 1024 cells") {
  const QVector apex = make_qvector({Rational(1, 2), Rational(1, 2)});
  const QVector lo = make_qvector({Rational(13, 10), Rational(0)});
  const QVector hi = make_qvector({Rational(17, 10), Rational(0)});
  const TruncatedCone big = box_cone(apex, lo, hi, Rational(3));
  const TruncatedCone small = shrunk_box_cone(apex, lo, hi, Rational(3), Int(8));

  const auto rep = cover_cone_lattice_points(big, small, AffineLattice::standard(2),
                                             CoverStrategy::Boxes);
  CHECK(rep.strategy == CoverStrategy::Boxes);  // the grid fit, no fallback
  CHECK(rep.boxes_examined == 1024);
  CHECK(rep.bound == 1024);
  check_well_formed(rep);
}

TEST_CASE("space box grid has 4^3 3^9 cells") {
  const QVector apex =
      make_qvector({Rational(1, 2), Rational(1, 2), Rational(1, 2)});
  const QVector lo = make_qvector({Rational(10, 7), Rational(10, 7), Rational(0)});
  const QVector hi = make_qvector({Rational(11, 7), Rational(11, 7), Rational(0)});
  const TruncatedCone big = box_cone(apex, lo, hi, Rational(3));
  const TruncatedCone small = shrunk_box_cone(apex, lo, hi, Rational(3), Int(12));

  CHECK(linear_integer_optimize(small.hrep, QVector::Zero(3)).infeasible());

  const auto rep = cover_cone_lattice_points(big, small, AffineLattice::standard(3),
                                             CoverStrategy::Boxes);
  CHECK(rep.strategy == CoverStrategy::Boxes);
  CHECK(rep.boxes_examined == 1259712);
  CHECK(rep.bound == 1259712);
  check_well_formed(rep);
  check_coverage(rep, big, AffineLattice::standard(3));
}

TEST_CASE("oversized outer cone falls back to the flat family") {
  const QVector apex = make_qvector({Rational(1, 2), Rational(1, 2)});
  const QVector lo = make_qvector({Rational(13, 10), Rational(0)});
  const QVector hi = make_qvector({Rational(17, 10), Rational(0)});
  const TruncatedCone small = shrunk_box_cone(apex, lo, hi, Rational(3), Int(8));
  const QVector wlo = make_qvector({Rational(-5), Rational(0)});
  const QVector whi = make_qvector({Rational(5), Rational(0)});
  const TruncatedCone wide = box_cone(apex, wlo, whi, Rational(3));

  const auto rep = cover_cone_lattice_points(wide, small, AffineLattice::standard(2),
                                             CoverStrategy::Boxes);
  CHECK(rep.strategy == CoverStrategy::Flat);
  CHECK(rep.boxes_examined == 0);
  check_well_formed(rep);
  const int covered = check_coverage(rep, wide, AffineLattice::standard(2));
  CHECK(covered > 15);  // the wide cone holds plenty of points
}

TEST_CASE("wide inner cone is rejected with a witness") {
  const QVector apex = make_qvector({Rational(1, 2), Rational(1, 2)});
  const QVector lo = make_qvector({Rational(-8), Rational(0)});
  const QVector hi = make_qvector({Rational(8), Rational(0)});
  const TruncatedCone tall = box_cone(apex, lo, hi, Rational(9));
  const QVector wlo = make_qvector({Rational(-10), Rational(0)});
  const QVector whi = make_qvector({Rational(10), Rational(0)});
  const TruncatedCone bigger = box_cone(apex, wlo, whi, Rational(9));

  CHECK_THROWS_AS(cover_cone_lattice_points(bigger, tall, AffineLattice::standard(2),
                                            CoverStrategy::Flat),
                  std::runtime_error);
}

TEST_CASE("covers survive a change of lattice basis") {
  const QVector apex = make_qvector({Rational(1, 2), Rational(1, 2)});
  const QVector lo = make_qvector({Rational(13, 10), Rational(0)});
  const QVector hi = make_qvector({Rational(17, 10), Rational(0)});
  const TruncatedCone big = box_cone(apex, lo, hi, Rational(3));
  const TruncatedCone small = shrunk_box_cone(apex, lo, hi, Rational(3), Int(8));

  AffineLattice skew;
  skew.origin = QVector::Zero(2);
  skew.basis = QMatrix(2, 2);
  skew.basis << Rational(1), Rational(1), Rational(0), Rational(1);

  for (const auto strategy : {CoverStrategy::Flat, CoverStrategy::Boxes}) {
    const auto rep = cover_cone_lattice_points(big, small, skew, strategy);
    check_well_formed(rep);
    CHECK(check_coverage(rep, big, skew) > 0);
  }
}

TEST_CASE("random certified cones are covered within the count bounds") {
  std::mt19937 rng(20240817);
  std::uniform_int_distribution<int> pick_frac(0, 4);
  std::uniform_int_distribution<int> pick_hw(0, 2);
  std::uniform_int_distribution<int> pick_h(1, 2);
  std::uniform_int_distribution<int> pick_den(2, 5);
  std::uniform_int_distribution<int> pick_shift(-2, 2);
  std::uniform_int_distribution<int> pick_inflate(1, 2);
  const Rational fracs[] = {Rational(1, 3), Rational(2, 5), Rational(1, 2),
                            Rational(3, 5), Rational(2, 3)};
  const Rational hws[] = {Rational(1, 8), Rational(1, 5), Rational(1, 4)};

  int accepted = 0;
  int points_total = 0;
  for (int n : {2, 3}) {
    const int trials = n == 2 ? 60 : 24;
    for (int t = 0; t < trials; ++t) {
      QVector apex(n);
      for (Eigen::Index j = 0; j + 1 < n; ++j)
        apex(j) = Rational(pick_shift(rng)) + fracs[pick_frac(rng)];
      apex(n - 1) = Rational(1, pick_den(rng));
      const Rational level(pick_h(rng));
      const int inflate = pick_inflate(rng);
      QVector lo(n), hi(n), blo(n), bhi(n);
      for (Eigen::Index j = 0; j + 1 < n; ++j) {
        const Rational c = Rational(pick_shift(rng)) + fracs[pick_frac(rng)];
        const Rational hw = hws[pick_hw(rng)];
        lo(j) = c - hw;
        hi(j) = c + hw;
        blo(j) = c - Rational(inflate) * hw;
        bhi(j) = c + Rational(inflate) * hw;
      }
      lo(n - 1) = hi(n - 1) = blo(n - 1) = bhi(n - 1) = Rational(0);

      const TruncatedCone small =
          shrunk_box_cone(apex, lo, hi, level, Int(4 * n));
      if (!linear_integer_optimize(small.hrep, QVector::Zero(n)).infeasible())
        continue;  // not lattice point free; try another draw
      const TruncatedCone big = box_cone(apex, blo, bhi, level);
      ++accepted;

      const auto small_tp = TrackedPolytope::from_polytope(small.hrep);
      REQUIRE(small_tp.has_value());
      const Rational small_width =
          lattice_width(*small_tp, AffineLattice::standard(n)).width;

      const auto flat = cover_cone_lattice_points(big, small,
                                                  AffineLattice::standard(n),
                                                  CoverStrategy::Flat);
      check_well_formed(flat);
      points_total += check_coverage(flat, big, AffineLattice::standard(n));
      const Rational flat_cap =
          Rational(4 * (n - 1)) * small_width + Rational(2);
      CHECK(Rational(Int(static_cast<long>(flat.hyperplanes.size()))) <= flat_cap);

      const auto boxes = cover_cone_lattice_points(big, small,
                                                   AffineLattice::standard(n),
                                                   CoverStrategy::Boxes);
      check_well_formed(boxes);
      check_coverage(boxes, big, AffineLattice::standard(n));
      if (boxes.strategy == CoverStrategy::Boxes) {
        long cap = 1;
        for (int i = 0; i < n; ++i) cap *= 4 * n * n * n;
        CHECK(Int(static_cast<long>(boxes.hyperplanes.size())) <= Int(cap));
      }
    }
  }
  CHECK(accepted > 35);
  CHECK(points_total > 5);  // the coverage checks saw real points
}

TEST_CASE("cover output is deterministic") {
  const QVector apex = make_qvector({Rational(1, 2), Rational(1, 2)});
  const QVector lo = make_qvector({Rational(13, 10), Rational(0)});
  const QVector hi = make_qvector({Rational(17, 10), Rational(0)});
  const TruncatedCone big = box_cone(apex, lo, hi, Rational(3));
  const TruncatedCone small = shrunk_box_cone(apex, lo, hi, Rational(3), Int(8));

  for (const auto strategy : {CoverStrategy::Flat, CoverStrategy::Boxes}) {
    const auto a =
        cover_cone_lattice_points(big, small, AffineLattice::standard(2), strategy);
    const auto b =
        cover_cone_lattice_points(big, small, AffineLattice::standard(2), strategy);
    REQUIRE(a.hyperplanes.size() == b.hyperplanes.size());
    for (std::size_t i = 0; i < a.hyperplanes.size(); ++i)
      CHECK(a.hyperplanes[i] == b.hyperplanes[i]);
    CHECK(a.boxes_examined == b.boxes_examined);
    CHECK(a.bound == b.bound);
  }
}
