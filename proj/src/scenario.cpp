#include "strhc/scenario.hpp"

#include <algorithm>
#include <stdexcept>

#include "strhc/polytope.hpp"

namespace strhc::sim {

int start_region_index(const reach::ControllableFamily& fam, int violation_window) {
  return std::min(fam.ring_count(), fam.max_safe_index + violation_window);
}

void validate_scenario(const Scenario& sc, const model::SystemModel& m,
                       const reach::ControllableFamily& fam) {
  model::validate(m);
  if (sc.horizon < 0) throw std::invalid_argument("scenario: negative horizon");
  if (sc.sample_time <= 0.0) throw std::invalid_argument("scenario: sample time must be positive");
  if (sc.rekey_steps < 1) throw std::invalid_argument("scenario: rekey window must be positive");
  if (sc.violation_window < sc.rekey_steps)
    throw std::invalid_argument("scenario: quiet period shorter than the rekey window");
  if (sc.rekey_steps != fam.tau)
    throw std::invalid_argument("scenario: rekey window does not match the family's hold span");
  if (sc.violation_window != fam.violation_window)
    throw std::invalid_argument("scenario: quiet period does not match the family's");
  if (sc.x0.size() != m.state_dim())
    throw std::invalid_argument("scenario: start state dimension mismatch");
  const int start = start_region_index(fam, sc.violation_window);
  if (!geom::contains(fam.state_sets[static_cast<size_t>(start)], sc.x0))
    throw std::invalid_argument("scenario: start state outside the feasible start region");
  adv::validate_script(sc.attacks, sc.horizon, sc.rekey_steps, sc.violation_window);
}

}  // namespace strhc::sim
