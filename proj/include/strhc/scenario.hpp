#pragma once

#include <cstdint>

#include <Eigen/Dense>

#include "strhc/adversary.hpp"
#include "strhc/reach.hpp"
#include "strhc/system_model.hpp"

namespace strhc::sim {

/**
 * One closed-loop experiment: start state, horizon, the seeds for the two
 * defender-side streams, the channel timing constants, the family synthesis
 * parameters, and the attack script. rekey_steps is the controller's silence
 * length after a detection (the time to stand up fresh encrypted channels);
 * violation_window is the guaranteed quiet period an attacker needs between
 * breaches and must dominate rekey_steps.
 */
struct Scenario {
  Eigen::VectorXd x0;
  int horizon = 0;
  double sample_time = 0.02;
  std::uint64_t disturbance_seed = 1;
  std::uint64_t watermark_seed = 1;
  int rekey_steps = 4;
  int violation_window = 5;
  reach::SynthesisOptions synth;
  adv::AttackScript attacks;
};

// Structural checks against the synthesized family: timing constants match
// the family's, and x0 lies in the start region that keeps the loop feasible
// through a worst-case first outage. Throws std::invalid_argument.
void validate_scenario(const Scenario& sc, const model::SystemModel& m,
                       const reach::ControllableFamily& fam);

// Largest ring index a run may start from: the certified safe index plus the
// quiet period, capped at the family size.
int start_region_index(const reach::ControllableFamily& fam, int violation_window);

}  // namespace strhc::sim
