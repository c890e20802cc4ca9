#pragma once

#include <string>

#include "strhc/reach.hpp"
#include "strhc/trace.hpp"

namespace strhc::plot {

// Self-contained SVG documents for a planar closed-loop run: the state
// trajectory over the ring outlines, the applied input timeline, the true
// and estimated ring levels, and the defense flag lanes.
std::string trajectory_svg(const sim::SimTrace& trace, const reach::ControllableFamily& fam);
std::string inputs_svg(const sim::SimTrace& trace);
std::string levels_svg(const sim::SimTrace& trace);
std::string flags_svg(const sim::SimTrace& trace);

// Writes the four documents into dir (created when missing) as
// trajectory.svg, inputs.svg, levels.svg, flags.svg.
void emit_plots(const sim::SimTrace& trace, const reach::ControllableFamily& fam,
                const std::string& dir);

}  // namespace strhc::plot
