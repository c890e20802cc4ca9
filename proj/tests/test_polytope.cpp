#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include <Eigen/Dense>

#include "strhc/polytope.hpp"

using Eigen::MatrixXd;
using Eigen::Vector2d;
using Eigen::VectorXd;
using namespace strhc::geom;

namespace {

VectorXd vec2(double a, double b) {
  VectorXd v(2);
  v << a, b;
  return v;
}

VectorXd vec1(double a) {
  VectorXd v(1);
  v << a;
  return v;
}

Polytope triangle() {
  // x >= 0, y >= 0, x + y <= 1
  MatrixXd A(3, 2);
  A << -1, 0, 0, -1, 1, 1;
  VectorXd b(3);
  b << 0, 0, 1;
  return Polytope::from_inequalities(A, b);
}

}  // namespace

TEST_CASE("box membership, support and bounds") {
  Polytope p = Polytope::box(vec2(-1, 0), vec2(3, 4));
  CHECK(p.row_count() == 4);
  CHECK(contains(p, vec2(0, 2)));
  CHECK(contains(p, vec2(3, 4)));
  CHECK_FALSE(contains(p, vec2(3.1, 2)));
  CHECK(support(p, vec2(1, 0)) == doctest::Approx(3.0));
  CHECK(support(p, vec2(0, -1)) == doctest::Approx(0.0));
  CHECK(support(p, vec2(1, 1)) == doctest::Approx(7.0));
  Box bb = bounding_box(p);
  CHECK(bb.lower(0) == doctest::Approx(-1.0));
  CHECK(bb.upper(1) == doctest::Approx(4.0));
  auto center = chebyshev_center(p);
  REQUIRE(center.has_value());
  CHECK((*center)(0) == doctest::Approx(1.0));
  CHECK((*center)(1) == doctest::Approx(2.0));
}

TEST_CASE("empty and full sets behave canonically") {
  Polytope e = Polytope::empty_set(2);
  CHECK(is_empty(e));
  CHECK_FALSE(contains(e, vec2(0, 0)));
  CHECK(support(e, vec2(1, 0)) == -std::numeric_limits<double>::infinity());
  CHECK_FALSE(chebyshev_center(e).has_value());

  Polytope full(2);
  CHECK_FALSE(is_empty(full));
  CHECK(full.row_count() == 0);
  CHECK(contains(full, vec2(1e9, -1e9)));
  CHECK(support(full, vec2(1, 0)) == std::numeric_limits<double>::infinity());

  CHECK(is_empty(intersect(e, full)));
  CHECK(is_empty(minkowski_sum(e, full)));
  CHECK(is_empty(Polytope::box(vec1(2.0), vec1(1.0))));
}

TEST_CASE("construction strips redundant and duplicate rows") {
  MatrixXd A(6, 2);
  A << 1, 0, -1, 0, 0, 1, 0, -1, 1, 0, 2, 0;
  VectorXd b(6);
  b << 1, 1, 1, 1, 3, 10;  // last two rows are slack
  Polytope p = Polytope::from_inequalities(A, b);
  CHECK(p.row_count() == 4);
  CHECK(support(p, vec2(1, 0)) == doctest::Approx(1.0));
}

TEST_CASE("flat sets keep their opposing constraint pairs") {
  // The segment x + y == 1 with |x| <= 2.
  MatrixXd A(4, 2);
  A << 1, 1, -1, -1, 1, 0, -1, 0;
  VectorXd b(4);
  b << 1, -1, 2, 2;
  Polytope p = Polytope::from_inequalities(A, b);
  CHECK(p.row_count() == 4);
  CHECK_FALSE(is_empty(p));
  CHECK(support(p, vec2(1, 1)) == doctest::Approx(1.0));
  CHECK(support(p, vec2(-1, -1)) == doctest::Approx(-1.0));
  CHECK(contains(p, vec2(2, -1)));
  CHECK_FALSE(contains(p, vec2(0.5, 0.6)));
  CHECK(planar_area(p) == doctest::Approx(0.0));
  CHECK(planar_vertices(p).size() == 2);
}

TEST_CASE("contradictory rows collapse to the canonical empty form") {
  MatrixXd A(2, 1);
  A << 1, -1;
  VectorXd b(2);
  b << -2, 1;  // x <= -2 and x >= -1
  Polytope p = Polytope::from_inequalities(A, b);
  CHECK(is_empty(p));
  CHECK(p.row_count() == 2);
}

TEST_CASE("intersection of shifted boxes") {
  Polytope a = Polytope::box(vec2(0, 0), vec2(2, 2));
  Polytope b = Polytope::box(vec2(1, 1), vec2(3, 3));
  Polytope c = intersect(a, b);
  CHECK(support(c, vec2(1, 0)) == doctest::Approx(2.0));
  CHECK(support(c, vec2(-1, 0)) == doctest::Approx(-1.0));
  CHECK(c.row_count() == 4);
  Polytope far = Polytope::box(vec2(5, 5), vec2(6, 6));
  CHECK(is_empty(intersect(a, far)));
}

TEST_CASE("invertible affine image maps supports exactly") {
  Polytope sq = Polytope::box(vec2(-1, -1), vec2(1, 1));
  MatrixXd R(2, 2);
  const double c = std::cos(0.3), s = std::sin(0.3);
  R << c, -s, s, c;
  Polytope img = affine_image(sq, 2.0 * R, vec2(1, -1));
  for (double ang = 0.0; ang < 6.28; ang += 0.37) {
    VectorXd d = vec2(std::cos(ang), std::sin(ang));
    const double expect = 2.0 * (R.transpose() * d).cwiseAbs().sum() + d.dot(vec2(1, -1));
    CHECK(support(img, d) == doctest::Approx(expect).epsilon(1e-7));
  }
}

TEST_CASE("wide affine image projects through a lift") {
  MatrixXd A(6, 3);
  A.setZero();
  VectorXd b(6);
  for (int j = 0; j < 3; ++j) {
    A(2 * j, j) = 1.0;
    b(2 * j) = 1.0;
    A(2 * j + 1, j) = -1.0;
    b(2 * j + 1) = 0.0;
  }
  Polytope cube = Polytope::from_inequalities(A, b);
  MatrixXd M(1, 3);
  M << 1, 1, 1;
  Polytope seg = affine_image(cube, M);
  CHECK(seg.dim() == 1);
  CHECK(support(seg, vec1(1)) == doctest::Approx(3.0));
  CHECK(support(seg, vec1(-1)) == doctest::Approx(0.0));
}

TEST_CASE("rank-deficient square image flattens the set") {
  Polytope sq = Polytope::box(vec2(-1, -1), vec2(1, 1));
  MatrixXd M(2, 2);
  M << 1, 1, 1, 1;
  Polytope flat = affine_image(sq, M);
  CHECK(contains(flat, vec2(2, 2)));
  CHECK(contains(flat, vec2(-2, -2)));
  CHECK_FALSE(contains(flat, vec2(1, 0)));
  CHECK(support(flat, vec2(1, 1)) == doctest::Approx(4.0));
}

TEST_CASE("planar sum of boxes adds the bounds") {
  Polytope a = Polytope::box(vec2(-1, -1), vec2(1, 1));
  Polytope b = Polytope::box(vec2(-0.5, -0.25), vec2(0.5, 0.25));
  Polytope s = minkowski_sum(a, b);
  Polytope expect = Polytope::box(vec2(-1.5, -1.25), vec2(1.5, 1.25));
  CHECK(is_subset(s, expect));
  CHECK(is_subset(expect, s));
}

TEST_CASE("planar sum of a triangle and a box") {
  Polytope t = triangle();
  Polytope b = Polytope::box(vec2(-0.1, -0.1), vec2(0.1, 0.1));
  Polytope s = minkowski_sum(t, b);
  // Support adds facet-wise for every direction, not only facet normals.
  for (double ang = 0.05; ang < 6.3; ang += 0.21) {
    VectorXd d = vec2(std::cos(ang), std::sin(ang));
    CHECK(support(s, d) == doctest::Approx(support(t, d) + support(b, d)).epsilon(1e-7));
  }
  CHECK(contains(s, vec2(-0.1, -0.1)));
  CHECK(contains(s, vec2(1.1, -0.1)));
  CHECK_FALSE(contains(s, vec2(0.7, 0.55)));
}

TEST_CASE("spatial sum through the lifted path") {
  VectorXd lo(3), hi(3), dlo(3), dhi(3);
  lo << -1, 0, 2;
  hi << 1, 2, 3;
  dlo << -0.2, -0.3, -0.1;
  dhi << 0.2, 0.3, 0.1;
  Polytope s = minkowski_sum(Polytope::box(lo, hi), Polytope::box(dlo, dhi));
  Polytope expect = Polytope::box(lo + dlo, hi + dhi);
  CHECK(is_subset(s, expect, 1e-6));
  CHECK(is_subset(expect, s, 1e-6));
}

TEST_CASE("erosion of the state box by a disturbance box") {
  Polytope X = Polytope::box(vec2(-2.5, -10.0), vec2(2.5, 10.0));
  Polytope E = Polytope::box(vec2(-0.001, -0.001), vec2(0.001, 0.001));
  Polytope D = pontryagin_diff(X, E);
  CHECK(support(D, vec2(1, 0)) == doctest::Approx(2.499));
  CHECK(support(D, vec2(-1, 0)) == doctest::Approx(2.499));
  CHECK(support(D, vec2(0, 1)) == doctest::Approx(9.999));
  CHECK(support(D, vec2(0, -1)) == doctest::Approx(9.999));
}

TEST_CASE("erosion then sum lands inside the original set") {
  std::mt19937_64 gen(555123u);
  auto unit = [&gen] { return static_cast<double>(gen() >> 11) * (1.0 / 9007199254740992.0); };
  for (int trial = 0; trial < 40; ++trial) {
    Polytope p = trial % 2 == 0
                     ? triangle()
                     : Polytope::box(vec2(-1 - unit(), -1 - unit()), vec2(1 + unit(), 1 + unit()));
    const double r = 0.05 + 0.2 * unit();
    Polytope q = Polytope::box(vec2(-r, -r), vec2(r, r));
    Polytope eroded = pontryagin_diff(p, q);
    if (is_empty(eroded)) continue;
    CHECK(is_subset(minkowski_sum(eroded, q), p, 1e-6));
  }
}

TEST_CASE("erosion by a larger set empties out") {
  Polytope p = Polytope::box(vec2(-0.1, -0.1), vec2(0.1, 0.1));
  Polytope q = Polytope::box(vec2(-1, -1), vec2(1, 1));
  CHECK(is_empty(pontryagin_diff(p, q)));
  CHECK(pontryagin_diff(p, Polytope::empty_set(2)).row_count() == 0);
}

TEST_CASE("projection eliminates the input coordinate") {
  // Variables (x, u): |x| <= 1, |u| <= 1, |x + u| <= 0.5.
  MatrixXd A(6, 2);
  A << 1, 0, -1, 0, 0, 1, 0, -1, 1, 1, -1, -1;
  VectorXd b(6);
  b << 1, 1, 1, 1, 0.5, 0.5;
  Polytope xi = Polytope::from_inequalities(A, b);
  Polytope px = project(xi, {0});
  CHECK(px.dim() == 1);
  CHECK(support(px, vec1(1)) == doctest::Approx(1.0));
  CHECK(support(px, vec1(-1)) == doctest::Approx(1.0));
  Polytope pu = project(xi, {1});
  CHECK(support(pu, vec1(1)) == doctest::Approx(1.0));
}

TEST_CASE("projection keeps the requested coordinate order") {
  Polytope p = Polytope::box(vec2(0, 2), vec2(1, 3));
  Polytope second = project(p, {1});
  CHECK(support(second, vec1(1)) == doctest::Approx(3.0));
  CHECK(support(second, vec1(-1)) == doctest::Approx(-2.0));
  CHECK_THROWS_AS(project(p, {0, 1}), std::invalid_argument);
  CHECK_THROWS_AS(project(p, {2}), std::invalid_argument);
}

TEST_CASE("projection of a spatial wedge") {
  // {(x, y, z) : 0 <= z <= 1, |x| <= z, |y| <= z} projects to |x| <= 1, |y| <= 1.
  MatrixXd A(6, 3);
  A << 0, 0, 1, 0, 0, -1, 1, 0, -1, -1, 0, -1, 0, 1, -1, 0, -1, -1;
  VectorXd b(6);
  b << 1, 0, 0, 0, 0, 0;
  Polytope cone = Polytope::from_inequalities(A, b);
  Polytope sq = project(cone, {0, 1});
  CHECK(support(sq, vec2(1, 0)) == doctest::Approx(1.0));
  CHECK(support(sq, vec2(0, -1)) == doctest::Approx(1.0));
  CHECK(contains(sq, vec2(0.9, -0.9)));
}

TEST_CASE("support points achieve the support value") {
  Polytope t = triangle();
  auto pt = support_point(t, vec2(1, 0));
  REQUIRE(pt.has_value());
  CHECK((*pt)(0) == doctest::Approx(1.0));
  CHECK(contains(t, *pt, 1e-7));
  CHECK_FALSE(support_point(Polytope::empty_set(2), vec2(1, 0)).has_value());
}

TEST_CASE("subset checks are directional") {
  Polytope inner = Polytope::box(vec2(-0.5, -0.5), vec2(0.5, 0.5));
  Polytope outer = Polytope::box(vec2(-1, -1), vec2(1, 1));
  CHECK(is_subset(inner, outer));
  CHECK_FALSE(is_subset(outer, inner));
  CHECK(is_subset(Polytope::empty_set(2), inner));
  CHECK(is_subset(inner, Polytope(2)));
}

TEST_CASE("planar vertices and area of simple shapes") {
  Polytope sq = Polytope::box(vec2(0, 0), vec2(2, 1));
  CHECK(planar_vertices(sq).size() == 4);
  CHECK(planar_area(sq) == doctest::Approx(2.0));
  CHECK(planar_area(triangle()) == doctest::Approx(0.5));
  CHECK(planar_vertices(Polytope::empty_set(2)).empty());
}

TEST_CASE("operations agree with dense membership sampling") {
  std::mt19937_64 gen(910456u);
  auto unit = [&gen] { return static_cast<double>(gen() >> 11) * (1.0 / 9007199254740992.0); };
  int checked = 0;
  for (int trial = 0; trial < 30; ++trial) {
    // Random polygon: intersection of 6 halfspaces tangent to a random circle.
    MatrixXd A(6, 2);
    VectorXd b(6);
    const double radius = 0.5 + unit();
    for (int i = 0; i < 6; ++i) {
      const double ang = 6.2831853 * unit();
      A.row(i) << std::cos(ang), std::sin(ang);
      b(i) = radius;
    }
    Polytope p = Polytope::from_inequalities(A, b);
    const double r = 0.1 + 0.3 * unit();
    Polytope q = Polytope::box(vec2(-r, -r), vec2(r, r));
    Polytope sum = minkowski_sum(p, q);
    Polytope diff = pontryagin_diff(p, q);
    for (int s = 0; s < 60; ++s) {
      const VectorXd zp = vec2(-2 + 4 * unit(), -2 + 4 * unit());
      const VectorXd zq = vec2(-r + 2 * r * unit(), -r + 2 * r * unit());
      if (contains(p, zp, 1e-9)) {
        CHECK(contains(sum, zp + zq, 1e-6));
        ++checked;
      }
      if (contains(diff, zp, 1e-9)) {
        CHECK(contains(p, zp + zq, 1e-6));
        ++checked;
      }
    }
  }
  CHECK(checked > 200);
}
