#pragma once

#include <Eigen/Dense>
#include <functional>

namespace strhc::lp {

enum class Status { Optimal, Infeasible, Unbounded };

struct Result {
  Status status = Status::Infeasible;
  double value = 0.0;            // objective at the optimum (only for Optimal)
  Eigen::VectorXd point;         // maximizer (only for Optimal)
};

/**
 * Maximize objective . z subject to lhs * z <= rhs, z free.
 *
 * Dense two-phase simplex sized for the small systems produced by the set
 * calculus (a handful of variables, up to a few hundred rows).
 */
Result maximize(const Eigen::VectorXd& objective, const Eigen::MatrixXd& lhs,
                const Eigen::VectorXd& rhs);

// Swappable backend so another solver can be dropped in. Passing nullptr
// restores the built-in simplex. Intended to be set once at startup.
using Backend = std::function<Result(const Eigen::VectorXd&, const Eigen::MatrixXd&,
                                     const Eigen::VectorXd&)>;
void set_backend(Backend backend);

}  // namespace strhc::lp
