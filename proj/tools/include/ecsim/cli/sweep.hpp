#pragma once

// Parameter sweeps over the protocol runners and their CSV / JSON output.

#include <nlohmann/json.hpp>

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ecsim/noise.hpp"

namespace ecsim::cli {

/// Bad command-line input or configuration; maps to exit code 2.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class Protocol { nec, cec, catalyst_reuse, distillation };
enum class Axis { a, p_d, p_g };
/// `retention` reads a and p_d (inputs and swept values) as 1 - x.
enum class AxisConvention { error, retention };

std::string to_string(Protocol p);
std::string to_string(Axis a);
std::string to_string(AxisConvention c);
Protocol parse_protocol(const std::string& s);
Axis parse_axis(const std::string& s);
AxisConvention parse_convention(const std::string& s);
/// Comma-separated list, e.g. "nec,cec".
std::vector<Protocol> parse_protocols(const std::string& s);

struct Range {
  double lo = 0.0;
  double hi = 0.0;
  double step = 0.0;

  /// "lo:hi:step"
  static Range parse(const std::string& s);
  /// lo, lo + step, ... up to hi (inclusive within 1e-9 of a step).
  std::vector<double> values() const;
};

struct SweepConfig {
  std::vector<Protocol> protocols;
  Axis axis = Axis::p_d;
  Range range;
  noise::NoiseParams base;  // error-probability convention
  std::size_t ttransforms_per_round = 1;
  AxisConvention convention = AxisConvention::error;
  bool recompile_on_reuse = false;
  std::size_t threads = 0;  // 0: hardware concurrency

  /// Throws UsageError.
  void validate() const;
  /// Noise parameters at one swept value (given in the configured convention).
  noise::NoiseParams at(double axis_value) const;
};

struct SweepRow {
  Protocol protocol = Protocol::nec;
  double axis_value = 0.0;  // as swept, in the configured convention
  double a = 0.0;
  double p_d = 0.0;
  double p_g = 0.0;
  std::size_t g = 1;
  double success_probability = 0.0;
  double output_fidelity = 0.0;
  double infidelity = 0.0;
  std::optional<double> catalyst_fidelity_before;
  std::optional<double> catalyst_fidelity_after;
  std::size_t mcx_total = 0;
};

/// One row per (axis value, protocol), ordered by axis value then by the
/// fixed protocol order nec, cec, catalyst-reuse, distillation.
std::vector<SweepRow> run_sweep(const SweepConfig& config);

/// Runs a single protocol at fixed parameters.
SweepRow run_point(Protocol protocol, const noise::NoiseParams& params, std::size_t g,
                   bool recompile_on_reuse);

inline constexpr const char* kCsvVersion = "ecbench-sweep-v1";

void write_csv(std::ostream& out, const std::vector<SweepRow>& rows, Axis axis, AxisConvention convention);

struct CsvTable {
  std::optional<Axis> axis;  // from the header comment, when present
  AxisConvention convention = AxisConvention::error;
  std::vector<SweepRow> rows;
};

/// Throws UsageError on malformed input.
CsvTable read_csv(std::istream& in);

nlohmann::json to_json(const SweepConfig& config, const std::vector<SweepRow>& rows);

}  // namespace ecsim::cli
