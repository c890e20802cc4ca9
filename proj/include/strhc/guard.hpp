#pragma once

#include <optional>

#include <Eigen/Dense>

#include "strhc/polytope.hpp"
#include "strhc/reach.hpp"
#include "strhc/system_model.hpp"

namespace strhc::guard {

enum class Verdict { NoAttack, Attack };

// Per-step actuator regime: Normal applies the fresh command, HoldPrevious
// re-applies the stored one, ZeroInput coasts with zero until the next
// re-initialization.
enum class Mode { Normal, HoldPrevious, ZeroInput };

/**
 * Defense-side state. The estimated level i_hat tracks the controller's ring
 * from the actuator's side and may only lag behind (never below) the true
 * level during honest intervals. u_prev stores the last applied admissible
 * command for the hold fallback. reference holds the output prediction
 * window frozen when the last command left the controller; the detector
 * compares the next incoming measurement against it. vet_pending marks that
 * a fresh command was applied last step and its one-step consequence still
 * needs the membership check; coasting on a held command is already vetted,
 * which is what keeps a long outage from raising false consequence alarms.
 */
struct GuardState {
  int i_hat = 0;
  Eigen::VectorXd u_prev;
  Mode mode = Mode::Normal;
  bool vet_pending = false;
  std::optional<geom::Polytope> reference;
};

// What the actuator did this step, for the trace.
struct AppliedStep {
  Eigen::VectorXd input;
  bool pre_ok = true;
  bool post_ok = true;
  Mode mode = Mode::Normal;
  int i_hat = 0;
};

// Detector: attack when a frozen prediction window exists and the incoming
// measurement is missing or falls outside it. Without a window (nothing was
// commanded) there is nothing to contradict, so no alarm.
Verdict detect(const std::optional<geom::Polytope>& reference,
               const std::optional<Eigen::VectorXd>& y_next);

// Command firewall: membership of the incoming command in the estimated
// ring's command set (the terminal command hull at level zero). Union over
// lower rings collapsed by nesting.
bool pre_check(const reach::ControllableFamily& fam, int i_hat, const Eigen::VectorXd& u_tilde);

// Consequence firewall: membership of the local measurement in the
// estimated ring. Union collapsed by nesting.
bool post_check(const reach::ControllableFamily& fam, int i_hat, const Eigen::VectorXd& y);

// One actuator step: vets the consequence of a command freshly applied last
// step, then the incoming packet if one arrived, and applies the fresh
// command, the stored one, or zero accordingly. A failed consequence check
// poisons the stored command, so the zero regime sticks until
// reinitialize(). Every returned input is admissible.
AppliedStep actuator_step(GuardState& guard, const reach::ControllableFamily& fam,
                          const std::optional<Eigen::VectorXd>& u_tilde,
                          const Eigen::VectorXd& y);

// Post-recovery re-synchronization with the controller's fresh level.
void reinitialize(GuardState& guard, int level);

}  // namespace strhc::guard
