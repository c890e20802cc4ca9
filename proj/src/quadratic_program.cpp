#include "strhc/quadratic_program.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "strhc/linear_program.hpp"
#include "strhc/tolerance.hpp"

namespace strhc::qp {
namespace {

constexpr double kActiveTol = 1e-8;
constexpr double kStepTol = 1e-11;

// Interior-leaning feasible point via the largest-inscribed-ball program.
lp::Result feasible_point(const Eigen::MatrixXd& lhs, const Eigen::VectorXd& rhs) {
  const int n = static_cast<int>(lhs.cols());
  const int m = static_cast<int>(lhs.rows());
  Eigen::MatrixXd wide(m + 1, n + 1);
  Eigen::VectorXd wrhs(m + 1);
  for (int i = 0; i < m; ++i) {
    wide.row(i).head(n) = lhs.row(i);
    wide(i, n) = std::max(lhs.row(i).norm(), 1e-12);
    wrhs(i) = rhs(i);
  }
  // Keep the radius bounded so the program stays bounded on fat sets.
  wide.row(m).setZero();
  wide(m, n) = 1.0;
  wrhs(m) = 1e6;
  Eigen::VectorXd obj = Eigen::VectorXd::Zero(n + 1);
  obj(n) = 1.0;
  return lp::maximize(obj, wide, wrhs);
}

}  // namespace

Result minimize(const Eigen::MatrixXd& H, const Eigen::VectorXd& g,
                const Eigen::MatrixXd& lhs, const Eigen::VectorXd& rhs) {
  const int n = static_cast<int>(H.rows());
  const int m = static_cast<int>(lhs.rows());
  if (H.cols() != n || g.size() != n || (m > 0 && lhs.cols() != n) || rhs.size() != m)
    throw std::invalid_argument("quadratic program: dimension mismatch");

  Result out;
  Eigen::LLT<Eigen::MatrixXd> chol(H);
  if (chol.info() != Eigen::Success)
    throw std::invalid_argument("quadratic program: weight matrix not positive definite");

  if (m == 0) {
    out.status = Status::Optimal;
    out.point = chol.solve(-g);
    out.value = 0.5 * out.point.dot(H * out.point) + g.dot(out.point);
    return out;
  }

  auto start = feasible_point(lhs, rhs);
  if (start.status != lp::Status::Optimal || start.point(n) < -kSolverTol) {
    out.status = Status::Infeasible;
    return out;
  }
  Eigen::VectorXd u = start.point.head(n);

  // Try the unconstrained minimizer first.
  {
    Eigen::VectorXd cand = chol.solve(-g);
    if (((lhs * cand - rhs).array() <= kActiveTol).all()) {
      out.status = Status::Optimal;
      out.point = cand;
      out.value = 0.5 * cand.dot(H * cand) + g.dot(cand);
      return out;
    }
  }

  std::vector<int> active;
  Eigen::VectorXd slack = rhs - lhs * u;
  for (int i = 0; i < m && static_cast<int>(active.size()) < n; ++i)
    if (slack(i) <= kActiveTol) active.push_back(i);

  const int max_iter = 100 + 20 * m;
  for (int iter = 0; iter < max_iter; ++iter) {
    const int k = static_cast<int>(active.size());
    Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(n + k, n + k);
    kkt.topLeftCorner(n, n) = H;
    Eigen::VectorXd kr(n + k);
    kr.head(n) = -(H * u + g);
    for (int i = 0; i < k; ++i) {
      kkt.block(n + i, 0, 1, n) = lhs.row(active[static_cast<size_t>(i)]);
      kkt.block(0, n + i, n, 1) = lhs.row(active[static_cast<size_t>(i)]).transpose();
      kr(n + i) = rhs(active[static_cast<size_t>(i)]) - lhs.row(active[static_cast<size_t>(i)]).dot(u);
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(kkt);
    if (!lu.isInvertible()) {
      // A dependent working-set row sneaked in; discard the newest one.
      if (!active.empty()) { active.pop_back(); continue; }
      throw std::runtime_error("quadratic program: singular stationarity system");
    }
    Eigen::VectorXd sol = lu.solve(kr);
    Eigen::VectorXd d = sol.head(n);

    if (d.lpNorm<Eigen::Infinity>() <= kStepTol) {
      int worst = -1;
      double most_negative = -kSolverTol;
      for (int i = 0; i < k; ++i) {
        const double mult = sol(n + i);
        if (mult < most_negative) { most_negative = mult; worst = i; }
      }
      if (worst < 0) {
        out.status = Status::Optimal;
        out.point = u;
        out.value = 0.5 * u.dot(H * u) + g.dot(u);
        return out;
      }
      active.erase(active.begin() + worst);
      continue;
    }

    double alpha = 1.0;
    int blocking = -1;
    for (int i = 0; i < m; ++i) {
      bool in_set = false;
      for (int a : active) in_set = in_set || a == i;
      if (in_set) continue;
      const double along = lhs.row(i).dot(d);
      if (along <= kStepTol) continue;
      const double room = (rhs(i) - lhs.row(i).dot(u)) / along;
      if (room < alpha - 1e-14) { alpha = std::max(room, 0.0); blocking = i; }
    }
    u += alpha * d;
    if (blocking >= 0 && static_cast<int>(active.size()) < n + 1) active.push_back(blocking);
  }
  throw std::runtime_error("quadratic program: iteration limit reached");
}

Result minimize_distance(const Eigen::MatrixXd& weight, const Eigen::VectorXd& center,
                         const Eigen::MatrixXd& lhs, const Eigen::VectorXd& rhs) {
  Result r = minimize(2.0 * weight, -2.0 * (weight * center), lhs, rhs);
  if (r.status == Status::Optimal) {
    const Eigen::VectorXd delta = r.point - center;
    r.value = delta.dot(weight * delta);
  }
  return r;
}

}  // namespace strhc::qp
