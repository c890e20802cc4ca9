#include "strhc/guard.hpp"

#include <algorithm>

#include "strhc/tolerance.hpp"

namespace strhc::guard {

Verdict detect(const std::optional<geom::Polytope>& reference,
               const std::optional<Eigen::VectorXd>& y_next) {
  if (!reference.has_value()) return Verdict::NoAttack;
  if (!y_next.has_value()) return Verdict::Attack;
  return geom::contains(*reference, *y_next) ? Verdict::NoAttack : Verdict::Attack;
}

bool pre_check(const reach::ControllableFamily& fam, int i_hat, const Eigen::VectorXd& u_tilde) {
  if (i_hat <= 0) return geom::contains(fam.terminal_input_set, u_tilde);
  const int level = std::min(i_hat, fam.ring_count());
  return geom::contains(fam.input_sets[static_cast<std::size_t>(level)], u_tilde);
}

bool post_check(const reach::ControllableFamily& fam, int i_hat, const Eigen::VectorXd& y) {
  const int level = std::clamp(i_hat, 0, fam.ring_count());
  return geom::contains(fam.state_sets[static_cast<std::size_t>(level)], y);
}

AppliedStep actuator_step(GuardState& guard, const reach::ControllableFamily& fam,
                          const std::optional<Eigen::VectorXd>& u_tilde,
                          const Eigen::VectorXd& y) {
  AppliedStep step;
  const Eigen::Index m = guard.u_prev.size();
  const bool vet = guard.vet_pending;
  guard.vet_pending = false;
  if (guard.mode == Mode::ZeroInput) {
    step.input = Eigen::VectorXd::Zero(m);
    step.post_ok = post_check(fam, guard.i_hat, y);
    step.pre_ok = !u_tilde.has_value() || pre_check(fam, guard.i_hat, *u_tilde);
    step.mode = Mode::ZeroInput;
  } else {
    step.post_ok = !vet || post_check(fam, guard.i_hat, y);
    if (!step.post_ok) {
      // The freshly applied command drove the plant out of the estimated
      // ring, so the stored command cannot be trusted either.
      step.pre_ok = !u_tilde.has_value() || pre_check(fam, guard.i_hat, *u_tilde);
      step.input = Eigen::VectorXd::Zero(m);
      guard.mode = Mode::ZeroInput;
      step.mode = Mode::ZeroInput;
    } else if (!u_tilde.has_value()) {
      step.input = guard.u_prev;
      step.mode = Mode::HoldPrevious;
    } else {
      step.pre_ok = pre_check(fam, guard.i_hat, *u_tilde);
      if (step.pre_ok) {
        step.input = *u_tilde;
        guard.i_hat = std::max(guard.i_hat - 1, 0);
        guard.vet_pending = true;
        step.mode = Mode::Normal;
      } else {
        step.input = guard.u_prev;
        step.mode = Mode::HoldPrevious;
      }
    }
  }
  guard.u_prev = step.input;
  step.i_hat = guard.i_hat;
  return step;
}

void reinitialize(GuardState& guard, int level) {
  guard.i_hat = std::max(level, 0);
  guard.mode = Mode::Normal;
  guard.vet_pending = false;
  guard.reference.reset();
}

}  // namespace strhc::guard
