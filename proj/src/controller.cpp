#include "strhc/controller.hpp"

#include <algorithm>
#include <string>

#include <Eigen/Cholesky>

#include "strhc/quadratic_program.hpp"
#include "strhc/tolerance.hpp"

namespace strhc::ctrl {

namespace {

constexpr std::uint64_t kCostStreamSalt = 0x636f737473ULL;
constexpr std::uint64_t kSelectStreamSalt = 0x73656c656374ULL;

// Offsets are the watermark lever: commands forged from a zero-centered
// emulation sit about an offset away from the genuine command, which the
// output prediction window then exposes. Spread chosen well above the
// disturbance floor of the bundled plant class, well below typical command
// authority.
constexpr double kOffsetSpread = 0.35;

Eigen::MatrixXd random_spd(rng::Stream& s, int m) {
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(m, m);
  for (int r = 0; r < m; ++r) {
    for (int c = 0; c < r; ++c) L(r, c) = rng::uniform_in(s, -0.2, 0.2);
    L(r, r) = rng::uniform_in(s, 0.8, 1.3);
  }
  return L * L.transpose();
}

}  // namespace

CostFamily canonical_cost_family(const Eigen::MatrixXd& base_gain, int input_dim) {
  CostFamily menu;
  menu.costs.push_back({Eigen::MatrixXd::Identity(input_dim, input_dim),
                        Eigen::VectorXd::Zero(input_dim), false});
  menu.terminal_laws.push_back(base_gain);
  return menu;
}

CostFamily anchored_canonical_cost_family(const Eigen::MatrixXd& base_gain, int input_dim) {
  auto menu = canonical_cost_family(base_gain, input_dim);
  menu.costs[0].anchored = true;
  return menu;
}

CostFamily draw_cost_family(const reach::ControllableFamily& fam,
                            std::uint64_t watermark_seed) {
  if (fam.terminal_gains.empty())
    throw std::invalid_argument("draw_cost_family: family has no terminal gains");
  const int m = static_cast<int>(fam.base_gain.rows());
  if (fam.terminal_gains.size() == 1)
    return anchored_canonical_cost_family(fam.base_gain, m);

  CostFamily menu;
  rng::Stream stream(watermark_seed ^ kCostStreamSalt);
  for (const auto& K : fam.terminal_gains) {
    CommandCost cost;
    cost.weight = random_spd(stream, m);
    cost.center = Eigen::VectorXd(m);
    for (int r = 0; r < m; ++r)
      cost.center(r) = rng::uniform_in(stream, -kOffsetSpread, kOffsetSpread);
    cost.anchored = true;
    menu.costs.push_back(std::move(cost));
    menu.terminal_laws.push_back(K);
  }
  return menu;
}

void validate_cost_family(const model::SystemModel& m, const reach::ControllableFamily& fam,
                          const CostFamily& menu) {
  model::validate(m);
  if (menu.costs.empty()) throw std::invalid_argument("cost family: empty menu");
  if (menu.costs.size() != menu.terminal_laws.size())
    throw std::invalid_argument("cost family: cost/law count mismatch");
  const int md = m.input_dim();
  const int n = m.state_dim();
  for (const auto& cost : menu.costs) {
    if (cost.weight.rows() != md || cost.weight.cols() != md || cost.center.size() != md)
      throw std::invalid_argument("cost family: cost dimension mismatch");
    if ((cost.weight - cost.weight.transpose()).cwiseAbs().maxCoeff() > 1e-9)
      throw std::invalid_argument("cost family: weight not symmetric");
    Eigen::LLT<Eigen::MatrixXd> llt(cost.weight);
    if (llt.info() != Eigen::Success)
      throw std::invalid_argument("cost family: weight not positive definite");
  }

  const auto& core = fam.state_sets.front();
  for (const auto& K : menu.terminal_laws) {
    if (K.rows() != md || K.cols() != n)
      throw std::invalid_argument("cost family: terminal law shape");
    const Eigen::MatrixXd closed = m.A + m.B * K;
    const Eigen::MatrixXd noise_gain = m.B * K;
    for (int i = 0; i < core.row_count(); ++i) {
      const Eigen::VectorXd d = core.normals().row(i).transpose();
      double reach = geom::support(core, (closed.transpose() * d).eval());
      reach += geom::support(m.process_noise, (m.Bd.transpose() * d).eval());
      reach += geom::support(m.measurement_noise, (noise_gain.transpose() * d).eval());
      if (reach > core.offsets()(i) + kGeomTol)
        throw std::invalid_argument("cost family: terminal law breaks ring invariance");
    }
    for (int i = 0; i < m.input_set.row_count(); ++i) {
      const Eigen::VectorXd a = m.input_set.normals().row(i).transpose();
      double used = geom::support(core, (K.transpose() * a).eval());
      used += geom::support(m.measurement_noise, (K.transpose() * a).eval());
      if (used > m.input_set.offsets()(i) + kGeomTol)
        throw std::invalid_argument("cost family: terminal law exceeds command bounds");
    }
  }
}

int set_level_index(const reach::ControllableFamily& fam, const Eigen::VectorXd& y) {
  const int N = fam.ring_count();
  for (int i = 0; i <= N; ++i)
    if (geom::contains(fam.state_sets[static_cast<size_t>(i)], y, kGeomTol)) return i;
  throw OutOfDomain("measurement outside the outermost ring");
}

Eigen::VectorXd solve_command(const reach::ControllableFamily& fam, const CostFamily& menu,
                              const Eigen::VectorXd& y, int level, int cost_index) {
  if (level < 1 || level > fam.ring_count())
    throw std::invalid_argument("solve_command: level out of range");
  if (cost_index < 0 || cost_index >= menu.size())
    throw std::invalid_argument("solve_command: cost index out of range");
  const auto& extended = fam.extended_sets[static_cast<size_t>(level)];
  const auto& input_shadow = fam.input_sets[static_cast<size_t>(level)];
  const int n = static_cast<int>(y.size());
  const int m = static_cast<int>(extended.dim()) - n;

  const int rows = extended.row_count() + input_shadow.row_count();
  Eigen::MatrixXd lhs(rows, m);
  Eigen::VectorXd rhs(rows);
  lhs.topRows(extended.row_count()) = extended.normals().rightCols(m);
  rhs.head(extended.row_count()) =
      extended.offsets() - extended.normals().leftCols(n) * y;
  lhs.bottomRows(input_shadow.row_count()) = input_shadow.normals();
  rhs.tail(input_shadow.row_count()) = input_shadow.offsets();
  rhs.array() += kGeomTol;

  const auto& cost = menu.costs[static_cast<size_t>(cost_index)];
  Eigen::VectorXd target = cost.center;
  if (cost.anchored) {
    auto anchor = geom::chebyshev_center(geom::Polytope::from_inequalities(lhs, rhs));
    if (anchor.has_value()) target += *anchor;
  }
  auto result = qp::minimize_distance(cost.weight, target, lhs, rhs);
  if (result.status != qp::Status::Optimal)
    throw InfeasibleCommand("no admissible command at ring " + std::to_string(level));
  // The feasibility slack can leave the optimum a hair outside the true
  // command set. Pull it back whenever the unslacked set can take it, so a
  // membership check downstream sees an admissible command instead of a
  // boundary coin flip.
  Eigen::VectorXd raw = rhs.array() - kGeomTol;
  if ((lhs * result.point - raw).maxCoeff() > 0.0) {
    auto polished =
        qp::minimize_distance(Eigen::MatrixXd::Identity(m, m), result.point, lhs, raw);
    if (polished.status == qp::Status::Optimal) return polished.point;
  }
  return result.point;
}

Eigen::VectorXd terminal_control(const model::SystemModel& m, const CostFamily& menu,
                                 int cost_index, const Eigen::VectorXd& y) {
  if (cost_index < 0 || cost_index >= menu.size())
    throw std::invalid_argument("terminal_control: cost index out of range");
  Eigen::VectorXd u = menu.terminal_laws[static_cast<size_t>(cost_index)] * y;
  if (!geom::contains(m.input_set, u, 1e-12)) {
    auto projected = qp::minimize_distance(
        Eigen::MatrixXd::Identity(u.size(), u.size()), u, m.input_set.normals(),
        m.input_set.offsets());
    if (projected.status != qp::Status::Optimal)
      throw InfeasibleCommand("terminal command projection failed");
    u = projected.point;
  }
  return u;
}

Automaton::Automaton(const model::SystemModel& m, const reach::ControllableFamily& fam,
                     CostFamily menu, std::uint64_t selection_seed)
    : model_(m),
      family_(fam),
      menu_(std::move(menu)),
      selection_(selection_seed ^ kSelectStreamSalt),
      window_(fam.tau) {
  validate_cost_family(m, fam, menu_);
}

int Automaton::draw_cost_index() {
  if (menu_.size() == 1) return 0;
  return static_cast<int>(rng::uniform_index(selection_, static_cast<std::uint64_t>(menu_.size())));
}

StepDecision Automaton::step(bool attack_flagged, const Eigen::VectorXd& y) {
  StepDecision d;
  if (status_ == Status::Attack) {
    // Re-encryption countdown: deaf and silent until the window closes.
    if (timer_ > 0) --timer_;
    if (timer_ == 0) {
      status_ = Status::NoAttack;
      level_ = -1;
    }
    d.silent = true;
    d.status = status_;
    d.timer = timer_;
    return d;
  }
  if (attack_flagged) {
    status_ = Status::Attack;
    timer_ = window_;
    d.silent = true;
    d.status = status_;
    d.timer = timer_;
    return d;
  }

  const int level = set_level_index(family_, y);
  if (!started_) {
    const int admissible =
        std::min(family_.ring_count(), family_.max_safe_index + family_.violation_window);
    if (level > admissible)
      throw OutOfDomain("start level " + std::to_string(level) +
                        " beyond the feasible start ring " + std::to_string(admissible));
    started_ = true;
  }
  level_ = level;
  const int j = draw_cost_index();
  d.level = level;
  d.cost_index = j;
  try {
    d.command = level == 0 ? terminal_control(model_, menu_, j, y)
                           : solve_command(family_, menu_, y, level, j);
  } catch (const InfeasibleCommand&) {
    // Corrupted measurement or stale family: react like a detection.
    status_ = Status::Attack;
    timer_ = window_;
    d.silent = true;
    d.anomaly = true;
    d.command = Eigen::VectorXd();
    d.level = -1;
    d.cost_index = -1;
  }
  d.status = status_;
  d.timer = timer_;
  return d;
}

}  // namespace strhc::ctrl
