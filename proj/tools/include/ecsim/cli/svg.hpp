#pragma once

#include <string>
#include <vector>

#include "ecsim/cli/sweep.hpp"

namespace ecsim::cli {

/// Two stacked line plots (infidelity, success probability) against the
/// swept axis, one polyline per protocol.
std::string render_svg(const std::vector<SweepRow>& rows, Axis axis, AxisConvention convention);

}  // namespace ecsim::cli
