#pragma once

// Dense complex linear algebra and quantum-state primitives.
//
// Qubit ordering: position 0 in a Layout is the most significant bit of a
// basis index. Bipartite protocol states are laid out with Alice's qubits
// first (data, then auxiliary) followed by Bob's.

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "ecsim/schmidt_vector.hpp"

namespace ecsim::qmath {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

inline constexpr double kStructuralTol = 1e-10;
inline constexpr double kNormTol = 1e-12;

enum class Party { alice, bob };
enum class Role { data, auxiliary, catalyst };

struct Qubit {
  std::string label;
  Party party = Party::alice;
  Role role = Role::data;

  bool operator==(const Qubit&) const = default;
};

class Layout {
 public:
  Layout() = default;
  /// Labels must be unique.
  explicit Layout(std::vector<Qubit> qubits);

  std::size_t size() const { return qubits_.size(); }
  std::size_t dim() const { return std::size_t{1} << qubits_.size(); }
  const std::vector<Qubit>& qubits() const { return qubits_; }
  const Qubit& operator[](std::size_t i) const { return qubits_[i]; }

  bool contains(const std::string& label) const;
  /// Throws DomainError for an unknown label.
  std::size_t index_of(const std::string& label) const;
  std::vector<std::size_t> indices_of(std::span<const std::string> labels) const;

  /// Labels of one party, in layout order. Auxiliary qubits are included
  /// only when `with_aux` is set.
  std::vector<std::string> labels(Party party, bool with_aux = false) const;
  std::vector<std::string> aux_labels(Party party) const;
  std::vector<std::string> all_labels() const;

  bool operator==(const Layout&) const = default;

 private:
  std::vector<Qubit> qubits_;
};

Layout concat(const Layout& a, const Layout& b);
/// Two-qubit layout {alice, bob}, both data qubits.
Layout pair_layout(const std::string& alice, const std::string& bob, Role role = Role::data);

class PureState {
 public:
  PureState() = default;
  /// Requires unit norm within kNormTol.
  PureState(Layout layout, ComplexVector amplitudes);
  static PureState normalized(Layout layout, ComplexVector amplitudes);
  /// Computational basis state |index>.
  static PureState basis(Layout layout, std::size_t index);

  const Layout& layout() const { return layout_; }
  const ComplexVector& amplitudes() const { return amplitudes_; }
  std::size_t dim() const { return static_cast<std::size_t>(amplitudes_.size()); }

  PureState relabeled(Layout layout) const;

 private:
  Layout layout_;
  ComplexVector amplitudes_;
};

class DensityMatrix {
 public:
  DensityMatrix() = default;
  /// Checks shape, Hermiticity (kStructuralTol, then symmetrized) and unit
  /// trace (kNormTol). Positivity is checked by validate().
  DensityMatrix(Layout layout, ComplexMatrix matrix);
  static DensityMatrix from_pure(const PureState& psi);
  static DensityMatrix maximally_mixed(Layout layout);

  const Layout& layout() const { return layout_; }
  const ComplexMatrix& matrix() const { return matrix_; }
  std::size_t dim() const { return static_cast<std::size_t>(matrix_.rows()); }

  /// Full invariant check including eigenvalues >= -kStructuralTol.
  /// Throws NumericalError.
  void validate() const;

  DensityMatrix relabeled(Layout layout) const;

 private:
  Layout layout_;
  ComplexMatrix matrix_;
};

struct SchmidtDecomposition {
  SchmidtVector coefficients;
  ComplexMatrix left_basis;   // columns: Alice-side Schmidt vectors
  ComplexMatrix right_basis;  // columns: Bob-side Schmidt vectors
  Layout left;
  Layout right;

  /// sum_i sqrt(c_i) |left_i>|right_i> on concat(left, right).
  PureState reconstruct() const;
};

struct TopEigenstate {
  double eigenvalue = 0.0;
  PureState state;
  bool degenerate = false;
};

// --- matrices ---------------------------------------------------------------

ComplexMatrix pauli_x();
ComplexMatrix pauli_y();
ComplexMatrix pauli_z();
ComplexMatrix hadamard();

/// Kronecker product, `a` most significant.
ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b);
PureState tensor(const PureState& a, const PureState& b);
DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b);

/// Permutation matrix P with (P v)_i = v_{perm[i]}.
Eigen::MatrixXd permutation_matrix(std::span<const std::size_t> perm);

// --- raw operator application ----------------------------------------------

/// op * rho * op^dagger where `op` acts on the qubits at `positions`
/// (positions[0] most significant within op) of an n-qubit register.
ComplexMatrix conjugate(const ComplexMatrix& rho, const ComplexMatrix& op,
                        std::span<const std::size_t> positions, std::size_t n_qubits);

/// op * psi for a vector, same conventions as conjugate().
ComplexVector apply(const ComplexVector& psi, const ComplexMatrix& op,
                    std::span<const std::size_t> positions, std::size_t n_qubits);

/// Unitary (or general) operator applied by label; no unitarity check.
DensityMatrix apply_operator(const DensityMatrix& rho, const ComplexMatrix& op,
                             std::span<const std::string> on);
PureState apply_operator(const PureState& psi, const ComplexMatrix& op,
                         std::span<const std::string> on);

// --- state operations -------------------------------------------------------

/// Reduced state on `keep`, in the order the labels appear in rho's layout.
DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const std::string> keep);

/// Reorders qubits to `target`, which must hold the same labels.
DensityMatrix reorder(const DensityMatrix& rho, const Layout& target);
PureState reorder(const PureState& psi, const Layout& target);

/// Schmidt decomposition across `left` vs the remaining qubits.
SchmidtDecomposition schmidt_decompose(const PureState& psi, std::span<const std::string> left);
/// Alice vs Bob cut taken from the party tags.
SchmidtDecomposition schmidt_decompose(const PureState& psi);

/// Decomposition of a ⊗ b assembled from the factors' decompositions; ties in
/// the coefficients keep the lexicographic (a-major) order.
SchmidtDecomposition schmidt_product(const SchmidtDecomposition& a, const SchmidtDecomposition& b);

/// <target| rho |target>.
double fidelity(const DensityMatrix& rho, const PureState& target);
double fidelity(const PureState& a, const PureState& b);

TopEigenstate top_eigenstate(const DensityMatrix& rho);

/// sum_k K rho K^dagger on the qubits `on`; requires sum K^dagger K = I.
DensityMatrix apply_channel(const DensityMatrix& rho, std::span<const ComplexMatrix> kraus,
                            std::span<const std::string> on);

}  // namespace ecsim::qmath
