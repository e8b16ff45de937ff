#include "conemin/polytope.hpp"

#include <random>
#include <stdexcept>

#include "doctest.h"

using namespace conemin;

namespace {

QVector qvec2(long x, long y) {
  QVector v(2);
  v << Rational(x), Rational(y);
  return v;
}

QVector qvec3(long x, long y, long z) {
  QVector v(3);
  v << Rational(x), Rational(y), Rational(z);
  return v;
}

}  // namespace

TEST_CASE("box construction, contains and slacks") {
  HPolytope P = HPolytope::box(qvec2(0, -1), qvec2(2, 3));
  CHECK(P.rows() == 4);
  CHECK(P.contains(qvec2(1, 0)));
  CHECK(P.contains(qvec2(0, 3)));
  CHECK(!P.contains(qvec2(3, 0)));
  CHECK(!P.contains(qvec2(1, -2)));

  QVector s = P.slacks(qvec2(1, 0));
  for (Eigen::Index i = 0; i < s.size(); ++i) CHECK(s(i) >= 0);
}

TEST_CASE("vertex enumeration of a cut square") {
  HPolytope P = HPolytope::box(qvec2(0, 0), qvec2(1, 1));
  QVector diag(2);
  diag << Rational(1), Rational(1);
  P.add_row(diag, Rational(3, 2));

  auto verts = enumerate_vertices(P);
  REQUIRE(verts.size() == 5);
  CHECK(verts[0] == qvec2(0, 0));
  CHECK(verts[1] == qvec2(0, 1));
  QVector half(2);
  half << Rational(1, 2), Rational(1);
  CHECK(verts[2] == half);
  CHECK(verts[4](0) == 1);
  CHECK(verts[4](1) == Rational(1, 2));

  auto comb = enumerate_vertices_combinatorial(P);
  CHECK(comb == verts);
}

TEST_CASE("tracked and combinatorial vertices agree on random polytopes") {
  std::mt19937_64 rng(29);
  std::uniform_int_distribution<long> cd(-4, 4);
  std::uniform_int_distribution<long> od(-2, 10);

  int nonempty = 0;
  for (int trial = 0; trial < 120; ++trial) {
    const Eigen::Index n = 2 + (trial % 2);
    HPolytope P = HPolytope::cube(n, Rational(3));
    const int cuts = 2 + (int)(trial % 4);
    for (int k = 0; k < cuts; ++k) {
      QVector a(n);
      bool zero = true;
      for (Eigen::Index j = 0; j < n; ++j) {
        a(j) = Rational(cd(rng));
        if (a(j) != 0) zero = false;
      }
      if (zero) continue;
      P.add_row(a, Rational(od(rng)));
    }
    auto fast = enumerate_vertices(P);
    auto slow = enumerate_vertices_combinatorial(P);
    CHECK(fast == slow);
    if (!fast.empty()) ++nonempty;
  }
  CHECK(nonempty > 40);
}

TEST_CASE("volumes of boxes and simplices") {
  CHECK(polytope_volume(HPolytope::cube(2, Rational(2))) == 16);
  CHECK(polytope_volume(HPolytope::box(qvec3(0, 0, 0), qvec3(1, 2, 3))) == 6);

  HPolytope simplex2(2);
  simplex2.add_row(qvec2(-1, 0), Rational(0));
  simplex2.add_row(qvec2(0, -1), Rational(0));
  simplex2.add_row(qvec2(1, 1), Rational(1));
  CHECK(polytope_volume(simplex2) == Rational(1, 2));

  HPolytope simplex3(3);
  simplex3.add_row(qvec3(-1, 0, 0), Rational(0));
  simplex3.add_row(qvec3(0, -1, 0), Rational(0));
  simplex3.add_row(qvec3(0, 0, -1), Rational(0));
  QVector ones(3);
  ones << Rational(1), Rational(1), Rational(1);
  simplex3.add_row(ones, Rational(1));
  CHECK(polytope_volume(simplex3) == Rational(1, 6));

  // empty intersection has volume zero
  HPolytope empty = HPolytope::box(qvec2(0, 0), qvec2(1, 1));
  empty.add_row(qvec2(1, 0), Rational(-1));
  CHECK(polytope_volume(empty) == 0);
}

TEST_CASE("volume against Monte Carlo sampling") {
  std::mt19937_64 rng(31);
  std::uniform_int_distribution<long> cd(-3, 3);
  std::uniform_int_distribution<long> od(1, 9);
  std::uniform_int_distribution<long> samp(-5 * 1024, 5 * 1024);

  for (int trial = 0; trial < 6; ++trial) {
    HPolytope P = HPolytope::cube(3, Rational(5));
    for (int k = 0; k < 4; ++k) {
      QVector a(3);
      bool zero = true;
      for (Eigen::Index j = 0; j < 3; ++j) {
        a(j) = Rational(cd(rng));
        if (a(j) != 0) zero = false;
      }
      if (zero) continue;
      P.add_row(a, Rational(od(rng)));
    }
    Rational vol = polytope_volume(P);
    if (vol == 0) continue;

    const int N = 20000;
    int hits = 0;
    for (int s = 0; s < N; ++s) {
      QVector x(3);
      for (int j = 0; j < 3; ++j) x(j) = Rational(samp(rng), 1024);
      if (P.contains(x)) ++hits;
    }
    double est = 1000.0 * hits / N;
    double exact = vol.convert_to<double>();
    CHECK(std::abs(est - exact) < 0.12 * exact + 12.0);
  }
}

TEST_CASE("lower dimensional volumes within the affine hull") {
  // axis-aligned square section of a 3-D box
  HPolytope P = HPolytope::box(qvec3(0, 0, 0), qvec3(4, 3, 3));
  QVector ex(3);
  ex << Rational(1), Rational(0), Rational(0);
  P.add_equality(ex, Rational(2));
  CHECK(polytope_volume(P) == 9);

  // a diagonal segment has irrational length
  HPolytope seg(3);
  seg.add_row(qvec3(-1, 0, 0), Rational(0));
  seg.add_row(qvec3(1, 0, 0), Rational(1));
  QVector d(3);
  d << Rational(1), Rational(-1), Rational(0);
  seg.add_equality(d, Rational(0));
  QVector ez(3);
  ez << Rational(0), Rational(0), Rational(1);
  seg.add_equality(ez, Rational(0));
  CHECK_THROWS_AS(polytope_volume(seg), std::domain_error);

  // single point
  HPolytope pt = HPolytope::box(qvec2(0, 0), qvec2(2, 2));
  pt.add_equality(qvec2(1, 0), Rational(1));
  pt.add_equality(qvec2(0, 1), Rational(1));
  CHECK(polytope_volume(pt) == 1);
}

TEST_CASE("shrink tightens every facet by rho over the denominator") {
  // [0,4]^2 with denominator 8: every side moves in by 1/2
  HPolytope sq = HPolytope::box(qvec2(0, 0), qvec2(4, 4));
  HPolytope sh = shrink_polytope(sq, Int(8));
  auto verts = enumerate_vertices(sh);
  REQUIRE(verts.size() == 4);
  CHECK(verts.front() == qvec2(0, 0) + QVector::Constant(2, Rational(1, 2)));
  CHECK(verts.back() == QVector::Constant(2, Rational(7, 2)));

  // standard triangle with denominator 8
  HPolytope tri(2);
  tri.add_row(qvec2(-1, 0), Rational(0));
  tri.add_row(qvec2(0, -1), Rational(0));
  tri.add_row(qvec2(1, 1), Rational(1));
  HPolytope ts = shrink_polytope(tri, Int(8));
  REQUIRE(ts.rows() == 3);
  CHECK(ts.b(0) == Rational(-1, 8));
  CHECK(ts.b(1) == Rational(-1, 8));
  CHECK(ts.b(2) == Rational(7, 8));

  // a redundant row does not survive to be tightened
  HPolytope sq2 = HPolytope::box(qvec2(0, 0), qvec2(4, 4));
  sq2.add_row(qvec2(1, 1), Rational(8));  // touches the corner only
  HPolytope sh2 = shrink_polytope(sq2, Int(8));
  CHECK(sh2.rows() == 4);
  CHECK(enumerate_vertices(sh2) == enumerate_vertices(sh));
}

TEST_CASE("shrink keeps equality carried bodies in their plane") {
  // segment {y = 1} x [0,4] shrinks along x only
  HPolytope P(2);
  P.add_row(qvec2(-1, 0), Rational(0));
  P.add_row(qvec2(1, 0), Rational(4));
  P.add_equality(qvec2(0, 1), Rational(1));
  HPolytope sh = shrink_polytope(P, Int(8));
  auto verts = enumerate_vertices(sh);
  REQUIRE(verts.size() == 2);
  CHECK(verts[0] == (QVector(2) << Rational(1, 2), Rational(1)).finished());
  CHECK(verts[1] == (QVector(2) << Rational(7, 2), Rational(1)).finished());
}

TEST_CASE("remove_redundant keeps exactly the facet rows") {
  HPolytope P = HPolytope::box(qvec2(0, 0), qvec2(2, 2));
  P.add_row(qvec2(1, 1), Rational(10));  // far away
  P.add_row(qvec2(1, 1), Rational(4));   // corner touching, still redundant
  HPolytope R = remove_redundant(P);
  CHECK(R.rows() == 4);
  for (Eigen::Index i = 0; i < 4; ++i) {
    CHECK(R.A.row(i) == P.A.row(i));
    CHECK(R.b(i) == P.b(i));
  }
}

TEST_CASE("canonicalize_rows scales to primitive normals and dedupes") {
  HPolytope P(2);
  QVector a(2);
  a << Rational(2), Rational(4);
  P.add_row(a, Rational(6));
  a << Rational(1), Rational(2);
  P.add_row(a, Rational(3));  // same halfspace
  a << Rational(1, 2), Rational(1);
  P.add_row(a, Rational(5));  // parallel, different offset
  HPolytope C = canonicalize_rows(P);
  CHECK(C.rows() == 2);
  CHECK(C.A(0, 0) == 1);
  CHECK(C.A(0, 1) == 2);
  CHECK(C.b(0) == 3);
  CHECK(C.b(1) == 10);
}

TEST_CASE("tracked polytope cuts update vertices incrementally") {
  TrackedPolytope tp = TrackedPolytope::from_box(qvec2(0, 0), qvec2(4, 4));
  CHECK(tp.vertices().size() == 4);
  CHECK(tp.volume() == 16);

  QVector a(2);
  a << Rational(1), Rational(1);
  REQUIRE(tp.cut(a, Rational(4)));
  CHECK(tp.vertices().size() == 3);
  CHECK(tp.volume() == 8);
  CHECK(tp.affine_dim() == 2);

  // touching cut through a vertex changes nothing
  a << Rational(-1), Rational(-1);
  REQUIRE(tp.cut(a, Rational(0)));
  CHECK(tp.vertices().size() == 3);
  CHECK(tp.volume() == 8);

  // collapse to a segment, then to a point
  a << Rational(1), Rational(0);
  REQUIRE(tp.cut(a, Rational(0)));
  CHECK(tp.vertices().size() == 2);
  CHECK(tp.affine_dim() == 1);
  a << Rational(0), Rational(1);
  REQUIRE(tp.cut(a, Rational(0)));
  CHECK(tp.vertices().size() == 1);
  CHECK(tp.affine_dim() == 0);
  CHECK(tp.volume() == 0);

  // and to empty
  a << Rational(0), Rational(1);
  CHECK(!tp.cut(a, Rational(-1)));
  CHECK(tp.empty());
}

TEST_CASE("tracked volume never grows under cuts") {
  std::mt19937_64 rng(37);
  std::uniform_int_distribution<long> cd(-3, 3);
  std::uniform_int_distribution<long> od(-1, 6);

  for (int trial = 0; trial < 25; ++trial) {
    TrackedPolytope tp = TrackedPolytope::from_box(qvec3(-2, -2, -2), qvec3(2, 2, 2));
    Rational prev = tp.volume();
    for (int k = 0; k < 5; ++k) {
      QVector a(3);
      bool zero = true;
      for (int j = 0; j < 3; ++j) {
        a(j) = Rational(cd(rng));
        if (a(j) != 0) zero = false;
      }
      if (zero) continue;
      if (!tp.cut(a, Rational(od(rng)))) break;
      Rational vol = tp.volume();
      CHECK(vol <= prev);
      prev = vol;
    }
  }
}

TEST_CASE("extrema by vertex scan matches the LP") {
  std::mt19937_64 rng(41);
  std::uniform_int_distribution<long> cd(-5, 5);
  HPolytope P = HPolytope::cube(3, Rational(2));
  P.add_row(qvec3(1, 1, 1), Rational(3));
  P.add_row(qvec3(-1, 2, 0), Rational(2));
  auto tp = TrackedPolytope::from_polytope(P);
  REQUIRE(tp);

  for (int k = 0; k < 20; ++k) {
    QVector dir(3);
    for (int j = 0; j < 3; ++j) dir(j) = Rational(cd(rng));
    auto [lo, hi] = tp->extrema(dir);
    CHECK(lo == lp_solve(P, dir, LPSense::Min).value);
    CHECK(hi == lp_solve(P, dir, LPSense::Max).value);
  }
}

TEST_CASE("bounding box and boundedness checks") {
  HPolytope P(2);
  P.add_row(qvec2(1, 0), Rational(3));
  CHECK(!is_bounded(P));
  CHECK_THROWS_AS(bounding_box(P), std::invalid_argument);

  HPolytope box = HPolytope::box(qvec2(-1, 2), qvec2(5, 7));
  box.add_row(qvec2(1, 1), Rational(100));
  CHECK(is_bounded(box));
  auto bb = bounding_box(box);
  REQUIRE(bb);
  CHECK(bb->first == qvec2(-1, 2));
  CHECK(bb->second == qvec2(5, 7));

  HPolytope empty = HPolytope::box(qvec2(0, 0), qvec2(1, 1));
  empty.add_row(qvec2(1, 0), Rational(-2));
  CHECK(!bounding_box(empty));
}
