#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "strhc/controller.hpp"
#include "strhc/polytope.hpp"
#include "strhc/reach.hpp"
#include "strhc/system_model.hpp"

namespace strhc::adv {

enum class Channel { Sensor, Actuator, Both };
enum class Kind { Dos, FdiAdditive, Stealthy };

/**
 * One scripted attack: a closed step window [t_start, t_end] on a channel.
 * Dos drops packets, FdiAdditive adds the payload to whatever is in flight,
 * Stealthy runs the emulation attacker and must own both channels. The goal
 * weight scales the stealthy injection between passive emulation (0) and the
 * full boundary-riding goal (1).
 */
struct AttackAction {
  int t_start = 0;
  int t_end = 0;
  Channel channel = Channel::Actuator;
  Kind kind = Kind::Dos;
  Eigen::VectorXd payload;
  double goal_weight = 1.0;
};

struct AttackScript {
  std::vector<AttackAction> actions;
};

bool action_active(const AttackAction& a, int t);

// The active action touching the given channel at step t, or nullptr.
const AttackAction* active_action(const AttackScript& script, int t, Channel channel);

// Window sanity plus the spacing rule: a new onset must leave room for the
// previous attack's recovery (one re-encryption window past its end) plus
// the guaranteed quiet period. Throws std::invalid_argument.
void validate_script(const AttackScript& script, int horizon, int rekey_steps,
                     int violation_window);

// Packet-level corruptions. A missing carrier stays missing: additive
// injection needs something in flight to ride on.
std::optional<Eigen::VectorXd> corrupt_actuator(const std::optional<Eigen::VectorXd>& u_c,
                                                const AttackAction& a);
std::optional<Eigen::VectorXd> corrupt_sensor(const std::optional<Eigen::VectorXd>& y,
                                              const AttackAction& a);

/**
 * Everything the emulation attacker holds: copies of the plant and the ring
 * family plus the cost menu it can reconstruct without the defender's
 * private selection material, i.e. the anchored baseline with the base
 * terminal law. There is deliberately no way to hand it the defender's
 * watermark seed or per-step cost index.
 */
struct AttackerKnowledge {
  model::SystemModel plant;
  reach::ControllableFamily family;
  ctrl::CostFamily assumed_menu;
  int assumed_cost_index = 0;
};

AttackerKnowledge make_knowledge(const model::SystemModel& m,
                                 const reach::ControllableFamily& fam);

/**
 * One emulation step. injection is the additive actuator signal u^a chosen
 * so the intended command (emulated + injection) rides the terminal command
 * set while steering the true state as far out as the terminal core allows;
 * forgery is the measurement to deliver next step, the disturbance-free
 * successor the defender expects. passive marks steps where the emulation
 * had no feasible program, in which case both channels pass through.
 */
struct StealthyDecision {
  Eigen::VectorXd injection;
  Eigen::VectorXd emulated_command;
  Eigen::VectorXd intended_command;
  Eigen::VectorXd forgery;
  bool passive = false;
};

StealthyDecision stealthy_step(const AttackerKnowledge& knowledge,
                               const Eigen::VectorXd& y_reported,
                               const Eigen::VectorXd& y_true, double goal_weight);

}  // namespace strhc::adv
