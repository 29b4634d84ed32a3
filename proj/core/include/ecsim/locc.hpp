#pragma once

// Compilation of a surrogate-state conversion into an executable schedule of
// diagonal POVM rounds plus a final filter, Naimark dilation of each round
// into an embedding unitary, MCX cost accounting, and execution of the
// schedule on density matrices with gate noise.
//
// All POVMs act on Alice's data register in the surrogate's Schmidt frame.
// Correction permutations are classical relabelings applied to both parties'
// data registers and cost no gates.

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "ecsim/majorize.hpp"
#include "ecsim/qmath.hpp"
#include "ecsim/schmidt_vector.hpp"

namespace ecsim::locc {

using majorize::Permutation;

/// Group every T-transform of the chain into a single round.
inline constexpr std::size_t kAllTransforms = std::numeric_limits<std::size_t>::max();

/// Diagonal POVM on a d-dimensional register. Off-support indices (where the
/// measured vector vanishes) carry a_0^j = 1 and zero elsewhere.
struct DiagonalPOVM {
  std::vector<std::vector<double>> elements;  // elements[m][j] = a_m^j
  std::vector<Permutation> corrections;       // one per outcome
  std::vector<double> weights;                // outcome probability on the surrogate
  std::vector<bool> support;

  std::size_t outcome_count() const { return elements.size(); }
  std::size_t dim() const { return support.size(); }
  bool trivial() const { return elements.size() <= 1; }

  /// Completeness within 1e-10, entries in [0, 1+1e-12]; NumericalError.
  void validate() const;
};

/// U_da = sum_j |j><j| (x) U^j over the data register.
struct EmbeddingUnitary {
  std::size_t data_dim = 0;
  std::size_t outcome_count = 1;
  std::size_t aux_count = 0;
  std::vector<Eigen::MatrixXd> blocks;  // U^j, 2^aux_count square
  std::vector<bool> identity;           // U^j == I

  std::size_t aux_dim() const { return std::size_t{1} << aux_count; }
  /// Dense (data_dim * aux_dim) matrix, data index most significant.
  Eigen::MatrixXd assembled() const;
};

struct McxGate {
  std::vector<std::string> touched;
};

/// One multi-controlled block U'_j = |j><j| (x) U^j + (I - |j><j|) (x) I.
struct SynthesisBlock {
  std::size_t data_index = 0;
  Eigen::MatrixXd unitary;
  std::vector<McxGate> mcx;
};

struct SynthesisReport {
  std::vector<SynthesisBlock> blocks;
  /// False when the round has more than two outcomes: MCX counts then come
  /// from the linear cost model and are not gate-exact.
  bool exact = true;

  std::size_t mcx_count() const;
  /// Ordered product of the U'_j blocks.
  Eigen::MatrixXd product(std::size_t data_dim, std::size_t aux_count) const;
};

struct Round {
  DiagonalPOVM povm;
  EmbeddingUnitary unitary;
  SynthesisReport synthesis;
  qmath::Party party = qmath::Party::alice;
  std::vector<double> current;  // frame vector before the round
  std::vector<double> target;   // frame vector after correction
};

/// Final SLOCC step: success operator F (diagonal), failure complement
/// sqrt(I - F^2). Indices outside the intermediate vector's support keep F = 1.
struct FilterStage {
  std::vector<double> diagonal;
  bool trivial = true;
  Round dilation;  // two-outcome round; outcome 0 is success
};

struct ProtocolSchedule {
  qmath::Layout layout;  // data qubits only, Alice first
  std::vector<std::string> alice_data;
  std::vector<std::string> bob_data;

  SchmidtVector initial;       // surrogate Schmidt vector
  SchmidtVector intermediate;  // end of the deterministic phase
  SchmidtVector target;        // padded target Schmidt vector
  double success_probability = 1.0;

  std::size_t ttransform_count = 0;
  std::size_t ttransforms_per_round = 1;

  // Local rotations into and out of the Schmidt frame.
  qmath::ComplexMatrix alice_to_frame;
  qmath::ComplexMatrix bob_to_frame;
  qmath::ComplexMatrix alice_from_frame;
  qmath::ComplexMatrix bob_from_frame;

  std::vector<Round> rounds;
  FilterStage filter;

  std::size_t total_mcx() const;
  std::size_t max_aux_count() const;
};

struct Branch {
  std::size_t outcome = 0;
  double weight = 0.0;
  qmath::DensityMatrix state;  // normalized
  Permutation correction;
};

struct FilterResult {
  double weight = 0.0;
  qmath::DensityMatrix state;  // normalized success branch
};

struct ScheduleRun {
  double success_probability = 0.0;
  qmath::DensityMatrix output;  // normalized success branch, target frame
  std::size_t branch_count = 1;
  std::vector<double> round_weight_sums;
};

/// Jensen-Schack POVM for one round: current = D * target,
/// A_m = q_m diag(P_m target) / current on the support of `current`, with
/// D = sum_m q_m P_m reduced to at most d terms.
DiagonalPOVM js_povm(std::span<const double> current, std::span<const double> target,
                     const majorize::DoublyStochastic& D);

/// Naimark dilation; any outcome count (aux_count = ceil(log2 m)). Each U^j
/// is the Householder reflection taking |0> to sum_m sqrt(a_m^j)|m>, which
/// for two outcomes is sqrt(a_0) Z + sqrt(a_1) X.
EmbeddingUnitary embed_povm(const DiagonalPOVM& povm);

/// One block per non-identity U^j, charged two MCX gates touching every
/// data qubit of the acting party plus its auxiliary qubits. Rounds with more
/// than two outcomes are only accepted with `allow_multi_element`; they are
/// charged 2(m-1) MCX per block.
SynthesisReport synthesize(const EmbeddingUnitary& u, std::span<const std::string> data_qubits,
                           std::span<const std::string> aux_qubits, bool allow_multi_element = false);

/// Builds the full schedule for surrogate -> target. `ttransforms_per_round`
/// of 1 reproduces one T-transform per round; kAllTransforms gives a single
/// round. Throws DomainError on a Schmidt-rank violation.
ProtocolSchedule compile_schedule(const qmath::SchmidtDecomposition& surrogate,
                                  const qmath::SchmidtDecomposition& target,
                                  std::size_t ttransforms_per_round);
ProtocolSchedule compile_schedule(const qmath::PureState& surrogate, const qmath::PureState& target,
                                  std::size_t ttransforms_per_round);

/// Gate noise on the touched qubits, then U_da, then a projective measurement
/// of the auxiliary register. If the layout holds Alice auxiliary qubits they
/// must be in |0> and are simulated explicitly (and reset to |0> in each
/// branch); otherwise fresh auxiliaries are attached implicitly. Returned
/// branches have not had their correction applied.
std::vector<Branch> execute_round(const qmath::DensityMatrix& state, const Round& round, double p_g);

/// Noiseless success branch F rho F^dagger of the filter.
FilterResult execute_filter(const qmath::DensityMatrix& state, const FilterStage& filter);

/// Relabels Alice's and Bob's data registers by `perm` (|i> -> |perm[i]>).
qmath::DensityMatrix apply_correction(const qmath::DensityMatrix& state, const Permutation& perm,
                                      std::span<const std::string> alice_data,
                                      std::span<const std::string> bob_data);

/// Runs the whole schedule on a physical data state (same labels as
/// schedule.layout). Output is expressed in the target's basis.
ScheduleRun execute_schedule(const ProtocolSchedule& schedule, const qmath::DensityMatrix& physical,
                             double p_g);

nlohmann::json to_json(const ProtocolSchedule& schedule);

}  // namespace ecsim::locc
