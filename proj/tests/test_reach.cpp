#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include <Eigen/Dense>

#include "fixtures.hpp"
#include "strhc/reach.hpp"
#include "strhc/rng.hpp"

using Eigen::MatrixXd;
using Eigen::VectorXd;
using namespace strhc;

namespace {

VectorXd vec1(double a) {
  VectorXd v(1);
  v << a;
  return v;
}

model::SystemModel scalar_plant(double a, double b, double xmax, double umax, double dmax) {
  using geom::Polytope;
  model::SystemModel m;
  m.A = MatrixXd::Constant(1, 1, a);
  m.B = MatrixXd::Constant(1, 1, b);
  m.Bd = MatrixXd::Constant(1, 1, 1.0);
  m.state_set = Polytope::box(vec1(-xmax), vec1(xmax));
  m.input_set = Polytope::box(vec1(-umax), vec1(umax));
  m.process_noise = Polytope::box(vec1(-dmax), vec1(dmax));
  m.measurement_noise = Polytope::singleton(VectorXd::Zero(1));
  model::validate(m);
  return m;
}

}  // namespace

TEST_CASE("scalar Riccati gain matches the closed form") {
  const double a = 1.2;
  MatrixXd A = MatrixXd::Constant(1, 1, a);
  MatrixXd B = MatrixXd::Constant(1, 1, 1.0);
  MatrixXd K = reach::lqr_gain(A, B, MatrixXd::Identity(1, 1), MatrixXd::Identity(1, 1));
  // P solves P = 1 + a^2 P - a^2 P^2 / (1 + P), i.e. P^2 - a^2 P - 1 = 0.
  const double P = 0.5 * (a * a + std::sqrt(a * a * a * a + 4.0));
  const double expect = -a * P / (1.0 + P);
  CHECK(K(0, 0) == doctest::Approx(expect).epsilon(1e-9));
  CHECK(std::abs(a + K(0, 0)) < 1.0);
}

TEST_CASE("benchmark gain stabilizes the loop") {
  auto bench = fixtures::benchmark();
  MatrixXd K = reach::lqr_gain(bench.plant.A, bench.plant.B, MatrixXd::Identity(2, 2),
                               MatrixXd::Identity(1, 1));
  Eigen::EigenSolver<MatrixXd> es(bench.plant.A + bench.plant.B * K, false);
  CHECK(es.eigenvalues().cwiseAbs().maxCoeff() < 1.0);
  // The open loop is unstable, so the gain has to act.
  Eigen::EigenSolver<MatrixXd> open(bench.plant.A, false);
  CHECK(open.eigenvalues().cwiseAbs().maxCoeff() > 1.0);
}

TEST_CASE("held input matrix accumulates powers") {
  MatrixXd A = MatrixXd::Constant(1, 1, 2.0);
  MatrixXd B = MatrixXd::Constant(1, 1, 1.0);
  CHECK(reach::held_input_matrix(A, B, 0)(0, 0) == doctest::Approx(0.0));
  CHECK(reach::held_input_matrix(A, B, 1)(0, 0) == doctest::Approx(1.0));
  CHECK(reach::held_input_matrix(A, B, 3)(0, 0) == doctest::Approx(7.0));
}

TEST_CASE("target erosion shrinks step by step") {
  auto m = scalar_plant(1.0, 1.0, 1.0, 0.1, 0.01);
  auto eroded = reach::erode_targets(m, m.state_set, 2);
  REQUIRE(eroded.size() == 3);
  CHECK(geom::support(eroded[0], vec1(1)) == doctest::Approx(1.0));
  CHECK(geom::support(eroded[1], vec1(1)) == doctest::Approx(0.99));
  CHECK(geom::support(eroded[2], vec1(1)) == doctest::Approx(0.98));
}

TEST_CASE("one ring from a scalar target without noise") {
  auto m = scalar_plant(1.0, 1.0, 1.0, 0.1, 0.0);
  using geom::Polytope;
  Polytope target = Polytope::box(vec1(-0.2), vec1(0.2));
  auto eroded = reach::erode_targets(m, target, 1);
  auto rs = reach::ring_step(m, eroded, 1);
  CHECK(geom::support(rs.state, vec1(1)) == doctest::Approx(0.3));
  CHECK(geom::support(rs.state, vec1(-1)) == doctest::Approx(0.3));
  CHECK(geom::support(rs.input, vec1(1)) == doctest::Approx(0.1));
}

TEST_CASE("two-step held rings grow by the input authority") {
  auto m = scalar_plant(1.0, 1.0, 1.0, 0.1, 0.0);
  using geom::Polytope;
  Polytope target = Polytope::box(vec1(-0.2), vec1(0.2));
  auto e0 = reach::erode_targets(m, target, 2);
  auto r1 = reach::ring_step(m, e0, 2);
  CHECK(geom::support(r1.state, vec1(1)) == doctest::Approx(0.3));
  auto e1 = reach::erode_targets(m, r1.state, 2);
  auto r2 = reach::ring_step(m, e1, 2);
  CHECK(geom::support(r2.state, vec1(1)) == doctest::Approx(0.4));
}

TEST_CASE("single-gain invariant set on a contractive plant") {
  auto m = scalar_plant(0.5, 1.0, 1.0, 1.0, 0.0);
  auto omega = reach::compute_rpi(m, MatrixXd::Zero(1, 1));
  CHECK(geom::support(omega, vec1(1)) == doctest::Approx(1.0));
  CHECK(geom::support(omega, vec1(-1)) == doctest::Approx(1.0));
}

TEST_CASE("invariant set empties when the noise outruns the contraction") {
  auto m = scalar_plant(0.5, 1.0, 0.15, 1.0, 0.1);
  auto omega = reach::compute_rpi(m, MatrixXd::Zero(1, 1));
  CHECK(geom::is_empty(omega));
  auto roomy = scalar_plant(0.5, 1.0, 1.0, 1.0, 0.1);
  auto omega2 = reach::compute_rpi(roomy, MatrixXd::Zero(1, 1));
  CHECK_FALSE(geom::is_empty(omega2));
  CHECK(geom::support(omega2, vec1(1)) == doctest::Approx(1.0));
}

TEST_CASE("disturbance floor box matches the geometric series on a scalar plant") {
  // |x+| <= 0.5|x| + 0.1 settles at 0.2; the box is that floor times the pad.
  auto m = scalar_plant(0.5, 1.0, 1.0, 1.0, 0.1);
  auto box = reach::disturbance_floor_box(m, MatrixXd::Zero(1, 1), 1.5);
  CHECK(geom::support(box, vec1(1)) == doctest::Approx(0.3).epsilon(1e-6));
  CHECK(geom::support(box, vec1(-1)) == doctest::Approx(0.3).epsilon(1e-6));
}

TEST_CASE("gain dither family is reproducible and respects the spread") {
  MatrixXd base(1, 2);
  base << -1.0, -2.0;
  auto one = reach::draw_terminal_gains(base, 99, 1, 0.5);
  REQUIRE(one.size() == 1);
  CHECK(one[0] == base);
  auto four = reach::draw_terminal_gains(base, 99, 4, 0.5);
  auto again = reach::draw_terminal_gains(base, 99, 4, 0.5);
  REQUIRE(four.size() == 4);
  for (int j = 0; j < 4; ++j) {
    CHECK(four[static_cast<size_t>(j)] == again[static_cast<size_t>(j)]);
    CHECK(((four[static_cast<size_t>(j)] - base).cwiseAbs().maxCoeff()) <= 0.5 + 1e-12);
  }
  bool some_differ = false;
  for (int j = 1; j < 4; ++j)
    if ((four[static_cast<size_t>(j)] - four[0]).norm() > 1e-6) some_differ = true;
  CHECK(some_differ);
  auto other = reach::draw_terminal_gains(base, 100, 4, 0.5);
  CHECK((other[0] - four[0]).norm() > 0.0);
  auto zero = reach::draw_terminal_gains(base, 99, 4, 0.0);
  for (const auto& K : zero) CHECK((K - base).norm() == doctest::Approx(0.0));
}

TEST_CASE("scalar synthesis saturates and certifies every ring") {
  auto m = scalar_plant(0.5, 1.0, 1.0, 0.1, 0.01);
  reach::SynthesisOptions opt;
  opt.tau = 2;
  opt.ring_count = 6;
  opt.violation_window = 2;
  opt.cost_family_size = 1;
  opt.watermark_seed = 7;
  auto fam = reach::synthesize_family(m, opt);
  CHECK(fam.ring_count() == 6);
  reach::validate_family(m, fam);
  // The terminal core hugs the disturbance floor; rings then expand by the
  // input authority against the 0.5 contraction and saturate at the state box.
  const double h0 = geom::support(fam.state_sets[0], vec1(1));
  CHECK(h0 > 0.0);
  CHECK(h0 < 0.2);
  CHECK(geom::support(fam.state_sets[6], vec1(1)) == doctest::Approx(1.0));
  CHECK(geom::support(fam.state_sets[6], vec1(-1)) == doctest::Approx(1.0));
  CHECK(fam.max_safe_index == 6);
  // Zero-input excursions really do stay put: forward simulate.
  rng::Stream s(4242);
  auto bb = geom::bounding_box(fam.state_sets[1]);
  for (int trial = 0; trial < 200; ++trial) {
    VectorXd x = rng::sample_polytope(s, fam.state_sets[1], bb);
    VectorXd u = vec1(rng::uniform_in(s, -0.1, 0.1));
    for (int k = 0; k < 2; ++k) {
      VectorXd dx = vec1(rng::uniform_in(s, -0.01, 0.01));
      x = model::step(m, x, u, dx);
      u = vec1(0.0);
      CHECK(geom::contains(fam.state_sets[3], x, 1e-7));
    }
  }
}

TEST_CASE("benchmark family synthesizes with nested rings") {
  auto bench = fixtures::benchmark();
  reach::SynthesisOptions opt;
  opt.tau = bench.tau;
  opt.ring_count = 12;
  opt.violation_window = bench.violation_window;
  opt.cost_family_size = bench.cost_family_size;
  opt.watermark_seed = 2024;
  auto fam = reach::synthesize_family(bench.plant, opt);
  reach::validate_family(bench.plant, fam);
  REQUIRE(fam.ring_count() == 12);
  CHECK(static_cast<int>(fam.terminal_gains.size()) == 4);

  // Strict growth in the early rings.
  const double a0 = geom::planar_area(fam.state_sets[0]);
  const double a6 = geom::planar_area(fam.state_sets[6]);
  const double a12 = geom::planar_area(fam.state_sets[12]);
  CHECK(a0 > 0.0);
  CHECK(a6 > a0 * 1.01);
  CHECK(a12 > a6 * 1.01);

  // Terminal set: every dithered gain keeps membership one step ahead under
  // the worst sampled disturbance, and held commands stay inside as well.
  rng::Stream s(808);
  auto bb = geom::bounding_box(fam.state_sets[0]);
  const auto& m = bench.plant;
  int tested = 0;
  for (int trial = 0; trial < 400; ++trial) {
    VectorXd x = rng::sample_polytope(s, fam.state_sets[0], bb);
    const auto& K = fam.terminal_gains[rng::uniform_index(s, fam.terminal_gains.size())];
    VectorXd u = K * x;
    CHECK(geom::contains(m.input_set, u, 1e-7));
    VectorXd xn = x;
    for (int k = 1; k <= fam.tau; ++k) {
      VectorXd dx = vec1(rng::uniform_in(s, -0.05, 0.05));
      xn = model::step(m, xn, u, dx);
      CHECK(geom::contains(fam.state_sets[0], xn, 1e-6));
    }
    VectorXd fresh = model::step(m, x, u, vec1(rng::uniform_in(s, -0.05, 0.05)));
    CHECK(geom::contains(fam.state_sets[0], fresh, 1e-6));
    ++tested;
  }
  CHECK(tested == 400);

  // A certified index must exist and the certificate must mean something:
  // one admissible command then zeros from ring r lands within the shifted ring.
  CHECK(fam.max_safe_index >= 1);
  const int r = std::min(fam.max_safe_index, 4);
  const int sidx = std::min(fam.ring_count(), r + fam.violation_window);
  auto rb = geom::bounding_box(fam.state_sets[static_cast<size_t>(r)]);
  for (int trial = 0; trial < 150; ++trial) {
    VectorXd x = rng::sample_polytope(s, fam.state_sets[static_cast<size_t>(r)], rb);
    VectorXd u = vec1(rng::uniform_in(s, -5.0, 5.0));
    for (int k = 1; k <= fam.tau; ++k) {
      x = model::step(m, x, u, vec1(rng::uniform_in(s, -0.05, 0.05)));
      u = vec1(0.0);
      CHECK(geom::contains(fam.state_sets[static_cast<size_t>(sidx)], x, 1e-6));
    }
  }
}

TEST_CASE("family validation rejects broken nesting") {
  auto m = scalar_plant(0.5, 1.0, 1.0, 0.1, 0.0);
  reach::SynthesisOptions opt;
  opt.tau = 1;
  opt.ring_count = 3;
  opt.violation_window = 1;
  opt.cost_family_size = 1;
  auto fam = reach::synthesize_family(m, opt);
  auto broken = fam;
  broken.state_sets[2] = geom::Polytope::box(vec1(-0.01), vec1(0.01));
  CHECK_THROWS_AS(reach::validate_family(m, broken), std::runtime_error);
  auto truncated = fam;
  truncated.input_sets.pop_back();
  CHECK_THROWS_AS(reach::validate_family(m, truncated), std::runtime_error);
}
