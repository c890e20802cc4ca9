#pragma once

#include "strhc/reach.hpp"
#include "strhc/scenario.hpp"
#include "strhc/trace.hpp"

namespace strhc::sim {

/**
 * Deterministic closed-loop run. Per step: draw the disturbances, measure,
 * pass the measurement through the sensor channel, run the detector and the
 * controller, pass the command through the actuator channel, let the guard
 * pick the applied input, step the plant. While the controller re-encrypts
 * both channels are down and the script has no carrier to ride.
 *
 * A run that loses feasibility (a measurement outside the outermost ring)
 * aborts with the diagnostics recorded on the trace; this must never happen
 * for a scenario that passes validation.
 */
SimTrace run_scenario(const Scenario& sc, const model::SystemModel& m,
                      const reach::ControllableFamily& fam);

}  // namespace strhc::sim
