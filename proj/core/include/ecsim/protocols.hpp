#pragma once

// End-to-end protocol runners: non-catalytic and catalytic concentration of
// two noisy pairs into one Bell pair, catalyst search and reuse, and the
// two-to-one distillation baseline.
//
// Pair states are two-qubit density matrices with one Alice and one Bob
// qubit (any labels). Internally the first pair becomes (A1, B1) and carries
// the output, the second (A2, B2), and a catalyst (Ac, Bc).

#include <nlohmann/json.hpp>

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "ecsim/locc.hpp"
#include "ecsim/qmath.hpp"
#include "ecsim/schmidt_vector.hpp"

namespace ecsim::protocols {

struct GateCounts {
  std::size_t alice = 0;
  std::size_t bob = 0;

  std::size_t total() const { return alice + bob; }
};

/// One-pair catalyst sqrt(c1)|00> + sqrt(c2)|11> on (Ac, Bc).
struct CatalystSpec {
  SchmidtVector schmidt;
  qmath::PureState state;

  /// c1 in [0.5, 1].
  static CatalystSpec from_c1(double c1);
  bool is_product() const { return schmidt[0] >= 1.0 - 1e-15; }
};

struct ProtocolResult {
  std::string protocol;
  double success_probability = 0.0;
  qmath::DensityMatrix output_state;  // output pair (A1, B1)
  double output_fidelity = 0.0;       // against Phi+
  std::optional<CatalystSpec> catalyst;
  std::optional<qmath::DensityMatrix> catalyst_input;
  std::optional<qmath::DensityMatrix> catalyst_post;
  std::optional<double> catalyst_fidelity_before;
  std::optional<double> catalyst_fidelity_after;
  GateCounts gate_counts;
  std::size_t round_count = 0;
  std::size_t branch_count = 1;
  double conversion_probability = 1.0;  // surrogate-level prediction
  bool degenerate_surrogate = false;

  double infidelity() const { return 1.0 - output_fidelity; }
};

/// Schedules the runners execute, for inspection.
locc::ProtocolSchedule nec_schedule(const qmath::DensityMatrix& rho1, const qmath::DensityMatrix& rho2,
                                    std::size_t ttransforms_per_round);
locc::ProtocolSchedule cec_schedule(const qmath::DensityMatrix& rho1, const qmath::DensityMatrix& rho2,
                                    const CatalystSpec& catalyst, std::size_t ttransforms_per_round);

ProtocolResult run_nec(const qmath::DensityMatrix& rho1, const qmath::DensityMatrix& rho2,
                       std::size_t ttransforms_per_round, double p_g);

/// Grid search (step 1e-4) over c1 in [0.5, 1] followed by a local
/// golden-section refinement. Ties go to the largest c1.
CatalystSpec find_catalyst(const SchmidtVector& surrogate, const SchmidtVector& target);
CatalystSpec find_catalyst(const qmath::PureState& surrogate, const qmath::PureState& target);

/// Catalyst maximizing the conversion probability of the pair surrogates.
CatalystSpec best_catalyst(const qmath::DensityMatrix& rho1, const qmath::DensityMatrix& rho2);

ProtocolResult run_cec(const qmath::DensityMatrix& rho1, const qmath::DensityMatrix& rho2,
                       const CatalystSpec& catalyst, std::size_t ttransforms_per_round, double p_g);
/// Physical catalyst given as a state; the schedule is compiled for its
/// maximum-weight eigenstate.
ProtocolResult run_cec(const qmath::DensityMatrix& rho1, const qmath::DensityMatrix& rho2,
                       const qmath::DensityMatrix& catalyst, std::size_t ttransforms_per_round, double p_g);

/// Second catalytic round using prev.catalyst_post as the physical catalyst.
/// By default the schedule is the one compiled for prev's ideal catalyst;
/// `recompile` compiles against the deteriorated catalyst's surrogate instead.
ProtocolResult reuse_catalyst(const ProtocolResult& prev, const qmath::DensityMatrix& rho1,
                              const qmath::DensityMatrix& rho2, std::size_t ttransforms_per_round,
                              double p_g, bool recompile = false);

// --- distillation -----------------------------------------------------------

enum class Basis { x, y, z };

/// 24 single-qubit Cliffords modulo phase; index 0 is the identity.
const std::vector<qmath::ComplexMatrix>& single_qubit_cliffords();

/// Alice applies Cliffords C_first (pair 1) and C_second (pair 2), Bob their
/// complex conjugates, so Phi+ (x) Phi+ is left invariant. Bilateral CNOT
/// from pair 1 onto pair 2, then pair 2 is measured in `basis` and kept when
/// the outcomes agree with the Phi+ correlation in that basis.
struct DistillationPlan {
  std::size_t first = 0;
  std::size_t second = 0;
  Basis basis = Basis::z;

  static constexpr std::size_t kCount = 24 * 24 * 3;
  std::size_t index() const { return (first * 24 + second) * 3 + static_cast<std::size_t>(basis); }
  static DistillationPlan from_index(std::size_t index);
  /// Rx(pi/2) on Alice's qubits, Rx(-pi/2) on Bob's, Z-basis readout.
  static DistillationPlan dejmps();
  bool operator==(const DistillationPlan&) const = default;
};

ProtocolResult run_distillation(const qmath::DensityMatrix& rho1, const qmath::DensityMatrix& rho2,
                                const DistillationPlan& plan, double p_g);

/// Exhaustive search over the plan family; first maximal fidelity by index.
DistillationPlan optimize_distillation(const qmath::DensityMatrix& rho1, const qmath::DensityMatrix& rho2,
                                       double p_g);

nlohmann::json to_json(const ProtocolResult& result);
std::string to_string(Basis basis);

}  // namespace ecsim::protocols
