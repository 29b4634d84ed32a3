#pragma once

#include <string>
#include <vector>

#include "ecsim/cli/sweep.hpp"

namespace ecsim::cli {

/// Axis value where the lowest-infidelity protocol changes.
struct Crossover {
  double axis_value = 0.0;  // first swept value with the new leader
  Protocol before = Protocol::nec;
  Protocol after = Protocol::nec;
};

struct ProtocolSummary {
  Protocol protocol = Protocol::nec;
  std::size_t points = 0;
  double min_infidelity = 0.0;
  double min_infidelity_at = 0.0;
  double max_infidelity = 0.0;
  double max_infidelity_at = 0.0;
  double min_success = 0.0;
  double max_success = 0.0;
};

struct Report {
  Axis axis = Axis::p_d;
  std::vector<ProtocolSummary> protocols;
  std::vector<Crossover> crossovers;
};

/// When the table carries no axis tag, the axis is the parameter column
/// that varies (p_d if none does).
Report summarize(const CsvTable& table);
std::string render(const Report& report, const CsvTable& table);

}  // namespace ecsim::cli
