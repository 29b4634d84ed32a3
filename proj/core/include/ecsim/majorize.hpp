#pragma once

// Majorization, conclusive-conversion probabilities and doubly-stochastic
// decompositions.
//
// Vectors passed as std::span are "frame-ordered": they follow a fixed basis
// labelling and need not be sorted. SchmidtVector arguments are sorted.

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <vector>

#include "ecsim/schmidt_vector.hpp"

namespace ecsim::majorize {

using Permutation = std::vector<std::size_t>;

inline constexpr double kMajorizationSlack = 1e-12;
inline constexpr double kStochasticTol = 1e-10;

class DoublyStochastic {
 public:
  DoublyStochastic() = default;
  /// Rows and columns must sum to 1 within kStochasticTol, entries >= 0.
  explicit DoublyStochastic(Eigen::MatrixXd matrix);
  static DoublyStochastic identity(std::size_t d);

  const Eigen::MatrixXd& matrix() const { return matrix_; }
  std::size_t dim() const { return static_cast<std::size_t>(matrix_.rows()); }

 private:
  Eigen::MatrixXd matrix_;
};

/// Mixes coordinates j < k: v_j' = t v_j + (1-t) v_k, v_k' = (1-t) v_j + t v_k.
struct TTransform {
  std::size_t j = 0;
  std::size_t k = 1;
  double t = 1.0;

  Eigen::MatrixXd matrix(std::size_t d) const;
  void apply(std::span<double> v) const;
};

struct BirkhoffTerm {
  double weight = 0.0;
  Permutation perm;  // (P v)_i = v_{perm[i]}
};

struct BirkhoffDecomposition {
  std::vector<BirkhoffTerm> terms;

  Eigen::MatrixXd reconstruct(std::size_t d) const;
};

enum class ConversionStatus { ok, rank_deficient };

struct ConversionCheck {
  double probability = 0.0;
  ConversionStatus status = ConversionStatus::ok;
};

/// Prefix-sum test sum_{i<=j} alpha_i <= sum_{i<=j} beta_i (sorted inputs);
/// shorter vector is zero-padded.
bool is_majorized(const SchmidtVector& alpha, const SchmidtVector& beta);

/// Position-wise prefix-sum test without sorting; equal lengths.
bool is_majorized_ordered(std::span<const double> alpha, std::span<const double> beta);

/// Optimal conclusive conversion probability min_l E_l(alpha) / E_l(beta),
/// E_l the tail sum from l; tails with E_l(beta) = 0 are skipped.
double vidal_probability(const SchmidtVector& alpha, const SchmidtVector& beta);
ConversionCheck check_conversion(const SchmidtVector& alpha, const SchmidtVector& beta);

/// Intermediate vector gamma reachable deterministically from alpha with
/// min_i gamma_i / beta_i equal to the conversion probability. Throws
/// DomainError when rank(alpha) < rank(beta).
SchmidtVector vidal_intermediate(const SchmidtVector& alpha, const SchmidtVector& beta);

/// T-transforms T_1..T_k (k <= d-1) with T_k ... T_1 beta = alpha. The
/// position-wise prefix condition must hold; throws DomainError otherwise.
std::vector<TTransform> t_transform_decompose(std::span<const double> alpha,
                                              std::span<const double> beta);
std::vector<TTransform> t_transform_decompose(const SchmidtVector& alpha, const SchmidtVector& beta);

/// D = T_k ... T_1 with D beta = alpha.
DoublyStochastic build_doubly_stochastic(const SchmidtVector& alpha, const SchmidtVector& beta);

/// Chunks of `group_size` consecutive transforms multiplied together:
/// result[r] = T_{(r+1)g} ... T_{rg+1}, so D = result.back() ... result.front().
std::vector<DoublyStochastic> group_ttransforms(std::span<const TTransform> ts, std::size_t d,
                                                std::size_t group_size);

/// Greedy maximum-bottleneck Birkhoff-von Neumann decomposition.
BirkhoffDecomposition birkhoff_decompose(const DoublyStochastic& D);

}  // namespace ecsim::majorize
