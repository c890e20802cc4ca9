#pragma once

#include <Eigen/Dense>

#include "strhc/polytope.hpp"

namespace strhc::model {

/**
 * Discrete-time constrained plant
 *   x(t+1) = A x(t) + B u(t) + Bd dx(t),   y(t) = x(t) + dy(t),
 * with x constrained to state_set, u to input_set, dx ranging over
 * process_noise and dy over measurement_noise.
 */
struct SystemModel {
  Eigen::MatrixXd A;
  Eigen::MatrixXd B;
  Eigen::MatrixXd Bd;
  geom::Polytope state_set;
  geom::Polytope input_set;
  geom::Polytope process_noise;
  geom::Polytope measurement_noise;

  int state_dim() const { return static_cast<int>(A.rows()); }
  int input_dim() const { return static_cast<int>(B.cols()); }
  int process_noise_dim() const { return static_cast<int>(Bd.cols()); }
};

// Checks shape consistency between the matrices and the constraint sets.
void validate(const SystemModel& m);

// Forward-Euler discretization of xdot = Ac x + Bc u + Bdc dx with sample
// time Ts > 0: A = I + Ts Ac, B = Ts Bc, Bd = Ts Bdc.
SystemModel discretize_forward_euler(const Eigen::MatrixXd& Ac, const Eigen::MatrixXd& Bc,
                                     const Eigen::MatrixXd& Bdc, double Ts,
                                     geom::Polytope state_set, geom::Polytope input_set,
                                     geom::Polytope process_noise,
                                     geom::Polytope measurement_noise);

Eigen::VectorXd step(const SystemModel& m, const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                     const Eigen::VectorXd& dx);

Eigen::VectorXd measure(const SystemModel& m, const Eigen::VectorXd& x,
                        const Eigen::VectorXd& dy);

// One-step output prediction set from a received measurement and the command
// applied with it: A y + B u spread by the mapped process noise. When
// inflate_by_mapped_noise is set the measurement noise, carried through the
// dynamics and added afresh on the next output, widens the set as well.
geom::Polytope output_prediction_set(const SystemModel& m, const Eigen::VectorXd& y,
                                     const Eigen::VectorXd& u,
                                     bool inflate_by_mapped_noise = false);

}  // namespace strhc::model
