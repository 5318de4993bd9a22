#pragma once

#include <iosfwd>

#include "latpath/lattice.hpp"

namespace latpath {

// Staircase plot of phi(t)/q as a single monotone polyline from (0,0) to
// (1,1) in data space (id="phi" in the emitted document).
void write_step_svg(std::ostream& out, const StepFunction& f);

}  // namespace latpath
