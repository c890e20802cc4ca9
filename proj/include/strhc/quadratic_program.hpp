#pragma once

#include <Eigen/Dense>

namespace strhc::qp {

enum class Status { Optimal, Infeasible };

struct Result {
  Status status = Status::Infeasible;
  Eigen::VectorXd point;
  double value = 0.0;
};

/**
 * Minimize 0.5 u' H u + g' u subject to lhs * u <= rhs.
 * H must be symmetric positive definite.
 *
 * Primal active-set method with an LP-found interior starting point.
 */
Result minimize(const Eigen::MatrixXd& H, const Eigen::VectorXd& g,
                const Eigen::MatrixXd& lhs, const Eigen::VectorXd& rhs);

// Minimize (u - center)' weight (u - center) over the same constraint form.
Result minimize_distance(const Eigen::MatrixXd& weight, const Eigen::VectorXd& center,
                         const Eigen::MatrixXd& lhs, const Eigen::VectorXd& rhs);

}  // namespace strhc::qp
