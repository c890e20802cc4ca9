#include "strhc/linear_program.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "strhc/tolerance.hpp"

namespace strhc::lp {
namespace {

Backend g_backend;  // empty -> builtin

constexpr double kCostEps = 1e-9;
constexpr double kPivotEps = 1e-9;
constexpr int kMaxIterations = 20000;
constexpr int kStallLimit = 64;

struct Tableau {
  // Rows hold the equality system in canonical form, basis columns identity.
  Eigen::MatrixXd rows;          // m x (ncols + 1), last column is the RHS
  std::vector<int> basis;        // basic column per row
  std::vector<bool> allowed;     // columns eligible to enter
  int ncols = 0;

  double rhs(int i) const { return rows(i, ncols); }

  void pivot(int r, int c) {
    rows.row(r) /= rows(r, c);
    for (int i = 0; i < rows.rows(); ++i) {
      if (i == r) continue;
      const double f = rows(i, c);
      if (std::abs(f) > 0.0) rows.row(i) -= f * rows.row(r);
    }
    basis[static_cast<size_t>(r)] = c;
  }
};

// Runs the simplex loop for "maximize obj over the tableau". Returns false if
// the objective is unbounded above.
bool run_simplex(Tableau& t, const Eigen::VectorXd& obj, int* iterations) {
  const int m = static_cast<int>(t.rows.rows());
  double last_value = -std::numeric_limits<double>::infinity();
  int stall = 0;
  bool bland = false;
  while (true) {
    if (++(*iterations) > kMaxIterations)
      throw std::runtime_error("linear program: iteration limit reached");

    // Reduced costs relative to the current basis.
    Eigen::VectorXd dual = Eigen::VectorXd::Zero(m);
    for (int i = 0; i < m; ++i) dual(i) = obj(t.basis[static_cast<size_t>(i)]);

    int enter = -1;
    double best = kCostEps;
    for (int j = 0; j < t.ncols; ++j) {
      if (!t.allowed[static_cast<size_t>(j)]) continue;
      const double reduced = obj(j) - dual.dot(t.rows.col(j));
      if (reduced > kCostEps) {
        if (bland) { enter = j; break; }
        if (reduced > best) { best = reduced; enter = j; }
      }
    }
    if (enter < 0) return true;  // optimal

    int leave = -1;
    double best_ratio = 0.0;
    for (int i = 0; i < m; ++i) {
      const double a = t.rows(i, enter);
      if (a <= kPivotEps) continue;
      const double ratio = t.rhs(i) / a;
      if (leave < 0 || ratio < best_ratio - 1e-12 ||
          (std::abs(ratio - best_ratio) <= 1e-12 &&
           t.basis[static_cast<size_t>(i)] < t.basis[static_cast<size_t>(leave)])) {
        leave = i;
        best_ratio = ratio;
      }
    }
    if (leave < 0) return false;  // unbounded

    t.pivot(leave, enter);

    double value = 0.0;
    for (int i = 0; i < m; ++i) value += obj(t.basis[static_cast<size_t>(i)]) * t.rhs(i);
    if (value <= last_value + 1e-12) {
      if (++stall > kStallLimit) bland = true;
    } else {
      stall = 0;
      bland = false;
    }
    last_value = value;
  }
}

Result builtin_maximize(const Eigen::VectorXd& objective, const Eigen::MatrixXd& lhs,
                        const Eigen::VectorXd& rhs) {
  const int n = static_cast<int>(objective.size());
  const int m = static_cast<int>(lhs.rows());
  if (lhs.cols() != n || rhs.size() != m)
    throw std::invalid_argument("linear program: dimension mismatch");
  if (!objective.allFinite() || !lhs.allFinite() || !rhs.allFinite())
    throw std::invalid_argument("linear program: non-finite input");

  Result out;
  if (m == 0) {
    // No constraints: bounded only for a zero objective.
    if (objective.lpNorm<Eigen::Infinity>() <= kCostEps) {
      out.status = Status::Optimal;
      out.value = 0.0;
      out.point = Eigen::VectorXd::Zero(n);
    } else {
      out.status = Status::Unbounded;
    }
    return out;
  }

  // Free variables split as z = zp - zn; slack per row; artificials where the
  // slack basis would start negative.
  std::vector<int> art_rows;
  for (int i = 0; i < m; ++i)
    if (rhs(i) < 0.0) art_rows.push_back(i);
  const int k = static_cast<int>(art_rows.size());
  const int ncols = 2 * n + m + k;

  Tableau t;
  t.ncols = ncols;
  t.rows = Eigen::MatrixXd::Zero(m, ncols + 1);
  t.basis.assign(static_cast<size_t>(m), -1);
  t.allowed.assign(static_cast<size_t>(ncols), true);

  int art = 0;
  for (int i = 0; i < m; ++i) {
    const double sign = rhs(i) < 0.0 ? -1.0 : 1.0;
    for (int j = 0; j < n; ++j) {
      t.rows(i, j) = sign * lhs(i, j);
      t.rows(i, n + j) = -sign * lhs(i, j);
    }
    t.rows(i, 2 * n + i) = sign;  // slack
    t.rows(i, ncols) = sign * rhs(i);
    if (sign < 0.0) {
      t.rows(i, 2 * n + m + art) = 1.0;
      t.basis[static_cast<size_t>(i)] = 2 * n + m + art;
      ++art;
    } else {
      t.basis[static_cast<size_t>(i)] = 2 * n + i;
    }
  }

  int iterations = 0;

  if (k > 0) {
    Eigen::VectorXd phase1 = Eigen::VectorXd::Zero(ncols);
    for (int j = 0; j < k; ++j) phase1(2 * n + m + j) = -1.0;
    // Canonicalize the artificial basis columns first.
    for (int i = 0; i < m; ++i)
      if (t.basis[static_cast<size_t>(i)] >= 2 * n + m) t.pivot(i, t.basis[static_cast<size_t>(i)]);
    run_simplex(t, phase1, &iterations);
    double infeas = 0.0;
    for (int i = 0; i < m; ++i)
      if (t.basis[static_cast<size_t>(i)] >= 2 * n + m) infeas += t.rhs(i);
    if (infeas > 1e-7) {
      out.status = Status::Infeasible;
      return out;
    }
    // Pivot leftover zero-level artificials out where possible.
    for (int i = 0; i < m; ++i) {
      if (t.basis[static_cast<size_t>(i)] < 2 * n + m) continue;
      int col = -1;
      for (int j = 0; j < 2 * n + m; ++j)
        if (std::abs(t.rows(i, j)) > kPivotEps) { col = j; break; }
      if (col >= 0) t.pivot(i, col);
    }
    for (int j = 0; j < k; ++j) t.allowed[static_cast<size_t>(2 * n + m + j)] = false;
  }

  Eigen::VectorXd phase2 = Eigen::VectorXd::Zero(ncols);
  for (int j = 0; j < n; ++j) {
    phase2(j) = objective(j);
    phase2(n + j) = -objective(j);
  }
  if (!run_simplex(t, phase2, &iterations)) {
    out.status = Status::Unbounded;
    return out;
  }

  Eigen::VectorXd z = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < m; ++i) {
    const int b = t.basis[static_cast<size_t>(i)];
    if (b < n)
      z(b) += t.rhs(i);
    else if (b < 2 * n)
      z(b - n) -= t.rhs(i);
  }
  out.status = Status::Optimal;
  out.point = z;
  out.value = objective.dot(z);
  return out;
}

}  // namespace

Result maximize(const Eigen::VectorXd& objective, const Eigen::MatrixXd& lhs,
                const Eigen::VectorXd& rhs) {
  if (g_backend) return g_backend(objective, lhs, rhs);
  return builtin_maximize(objective, lhs, rhs);
}

void set_backend(Backend backend) { g_backend = std::move(backend); }

}  // namespace strhc::lp
