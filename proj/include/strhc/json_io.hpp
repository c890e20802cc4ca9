#pragma once

#include <optional>
#include <string>

#include "strhc/reach.hpp"
#include "strhc/scenario.hpp"
#include "strhc/system_model.hpp"

namespace strhc::io {

// Plant description as a JSON document: dynamics matrices and the constraint
// and disturbance sets in halfspace form. Loading validates shapes and
// throws std::invalid_argument on malformed input.
std::string model_to_json(const model::SystemModel& m);
model::SystemModel model_from_json(const std::string& text);

// Experiment description: start state, horizon, seeds, channel timing,
// synthesis parameters, and the attack script. Structural checks only; the
// run-time checks against a synthesized family live in validate_scenario.
std::string scenario_to_json(const sim::Scenario& sc);
sim::Scenario scenario_from_json(const std::string& text);

// Digest binding a cached family to the exact plant and synthesis options
// that produced it.
std::string family_digest(const model::SystemModel& m, const reach::SynthesisOptions& opt);

// Offline synthesis cache. Loading returns nullopt when the stored digest
// does not match the given plant and options (the cache is stale, not
// malformed); a document that fails parsing or the structural family checks
// throws.
std::string family_to_cache(const reach::ControllableFamily& fam, const model::SystemModel& m,
                            const reach::SynthesisOptions& opt);
std::optional<reach::ControllableFamily> family_from_cache(const std::string& text,
                                                           const model::SystemModel& m,
                                                           const reach::SynthesisOptions& opt);

}  // namespace strhc::io
