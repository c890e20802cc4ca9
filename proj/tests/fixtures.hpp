#pragma once

#include <Eigen/Dense>

#include "strhc/polytope.hpp"
#include "strhc/system_model.hpp"

namespace fixtures {

// Unstable second-order benchmark plant used across the suites: forward-Euler
// discretization at 20 ms with box state/input constraints, a scalar matched
// process disturbance, and noiseless measurements.
struct Benchmark {
  strhc::model::SystemModel plant;
  Eigen::VectorXd x0;
  int tau = 4;
  int violation_window = 5;
  int rekey_steps = 4;
  int ring_count = 60;
  int cost_family_size = 4;
};

inline Benchmark benchmark() {
  using strhc::geom::Polytope;
  Eigen::MatrixXd Ac(2, 2), Bc(2, 1), Bdc(2, 1);
  Ac << 1.0, 4.0, 0.8, 0.5;
  Bc << 0.0, 1.0;
  Bdc << 1.0, 1.0;
  Eigen::VectorXd xlo(2), xhi(2), ulo(1), uhi(1), dlo(1), dhi(1);
  xlo << -2.5, -10.0;
  xhi << 2.5, 10.0;
  ulo << -5.0;
  uhi << 5.0;
  dlo << -0.05;
  dhi << 0.05;
  Benchmark bench;
  bench.plant = strhc::model::discretize_forward_euler(
      Ac, Bc, Bdc, 0.02, Polytope::box(xlo, xhi), Polytope::box(ulo, uhi),
      Polytope::box(dlo, dhi), Polytope::singleton(Eigen::VectorXd::Zero(2)));
  bench.x0 = Eigen::VectorXd(2);
  bench.x0 << -1.09, 5.11;
  return bench;
}

}  // namespace fixtures
