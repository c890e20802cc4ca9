#include "strhc/adversary.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "strhc/tolerance.hpp"

namespace strhc::adv {

bool action_active(const AttackAction& a, int t) { return t >= a.t_start && t <= a.t_end; }

const AttackAction* active_action(const AttackScript& script, int t, Channel channel) {
  for (const auto& a : script.actions) {
    if (!action_active(a, t)) continue;
    if (a.channel == channel || a.channel == Channel::Both || channel == Channel::Both)
      return &a;
  }
  return nullptr;
}

void validate_script(const AttackScript& script, int horizon, int rekey_steps,
                     int violation_window) {
  auto sorted = script.actions;
  std::sort(sorted.begin(), sorted.end(),
            [](const AttackAction& a, const AttackAction& b) { return a.t_start < b.t_start; });
  int previous_end = -1;
  bool first = true;
  for (const auto& a : sorted) {
    if (a.t_start < 0 || a.t_end < a.t_start || a.t_end >= horizon)
      throw std::invalid_argument("attack window outside the scenario horizon");
    if (a.kind == Kind::Stealthy && a.channel != Channel::Both)
      throw std::invalid_argument("a stealthy attack must own both channels");
    if (a.kind == Kind::FdiAdditive && a.payload.size() == 0)
      throw std::invalid_argument("an additive attack needs a payload");
    if (!first && a.t_start < previous_end + rekey_steps + violation_window)
      throw std::invalid_argument(
          "attack at step " + std::to_string(a.t_start) +
          " starts before the previous recovery plus the guaranteed quiet period");
    previous_end = a.t_end;
    first = false;
  }
}

std::optional<Eigen::VectorXd> corrupt_actuator(const std::optional<Eigen::VectorXd>& u_c,
                                                const AttackAction& a) {
  if (a.kind == Kind::Dos) return std::nullopt;
  if (!u_c.has_value()) return std::nullopt;
  if (a.kind == Kind::FdiAdditive) return *u_c + a.payload;
  return u_c;
}

std::optional<Eigen::VectorXd> corrupt_sensor(const std::optional<Eigen::VectorXd>& y,
                                              const AttackAction& a) {
  if (a.kind == Kind::Dos) return std::nullopt;
  if (!y.has_value()) return std::nullopt;
  if (a.kind == Kind::FdiAdditive) return *y + a.payload;
  return y;
}

AttackerKnowledge make_knowledge(const model::SystemModel& m,
                                 const reach::ControllableFamily& fam) {
  AttackerKnowledge k;
  k.plant = m;
  k.family = fam;
  k.assumed_menu = ctrl::anchored_canonical_cost_family(fam.base_gain, m.input_dim());
  return k;
}

namespace {

// Farthest admissible successor: maximize |A y + B u| over the commands that
// keep the disturbance-free successor inside the disturbance-eroded terminal
// ring while staying in the terminal command set. Exact for one command
// dimension (the maximum of a convex function over a segment sits at an
// endpoint); for wider commands the candidates are the support points along
// the coordinate axes.
std::optional<Eigen::VectorXd> farthest_terminal_command(const AttackerKnowledge& k,
                                                         const Eigen::VectorXd& y_true) {
  const auto& fam = k.family;
  const auto& m = k.plant;
  geom::Polytope core =
      geom::pontryagin_diff(fam.state_sets[0], geom::affine_image(m.process_noise, m.Bd));
  if (geom::is_empty(core)) return std::nullopt;

  const auto& hull = fam.terminal_input_set;
  const int mm = m.input_dim();
  const int rows = core.row_count() + hull.row_count();
  Eigen::MatrixXd lhs(rows, mm);
  Eigen::VectorXd rhs(rows);
  lhs.topRows(core.row_count()) = core.normals() * m.B;
  rhs.head(core.row_count()) = core.offsets() - core.normals() * (m.A * y_true);
  lhs.bottomRows(hull.row_count()) = hull.normals();
  rhs.tail(hull.row_count()) = hull.offsets();
  geom::Polytope feasible = geom::Polytope::from_inequalities(lhs, rhs);
  if (geom::is_empty(feasible)) return std::nullopt;

  std::optional<Eigen::VectorXd> best;
  double best_norm = -1.0;
  for (int i = 0; i < mm; ++i) {
    for (double sign : {1.0, -1.0}) {
      Eigen::VectorXd dir = Eigen::VectorXd::Zero(mm);
      dir(i) = sign;
      auto candidate = geom::support_point(feasible, dir);
      if (!candidate.has_value()) continue;
      double norm = (m.A * y_true + m.B * *candidate).norm();
      if (norm > best_norm) {
        best_norm = norm;
        best = candidate;
      }
    }
  }
  return best;
}

}  // namespace

StealthyDecision stealthy_step(const AttackerKnowledge& knowledge,
                               const Eigen::VectorXd& y_reported,
                               const Eigen::VectorXd& y_true, double goal_weight) {
  const auto& m = knowledge.plant;
  const auto& fam = knowledge.family;
  StealthyDecision d;
  d.injection = Eigen::VectorXd::Zero(m.input_dim());
  try {
    int level = ctrl::set_level_index(fam, y_reported);
    d.emulated_command =
        level == 0
            ? ctrl::terminal_control(m, knowledge.assumed_menu, knowledge.assumed_cost_index,
                                     y_reported)
            : ctrl::solve_command(fam, knowledge.assumed_menu, y_reported, level,
                                  knowledge.assumed_cost_index);
  } catch (const ctrl::OutOfDomain&) {
    d.passive = true;
    return d;
  } catch (const ctrl::InfeasibleCommand&) {
    d.passive = true;
    return d;
  }

  auto goal = farthest_terminal_command(knowledge, y_true);
  if (!goal.has_value()) {
    d.passive = true;
    return d;
  }
  d.intended_command = d.emulated_command + goal_weight * (*goal - d.emulated_command);
  d.injection = d.intended_command - d.emulated_command;
  d.forgery = m.A * y_reported + m.B * d.emulated_command;
  return d;
}

}  // namespace strhc::adv
