#pragma once

#include <cstddef>
#include <vector>

namespace ecsim {

/// Descending, nonnegative, unit-sum coefficient vector of a bipartite pure
/// state (the squared Schmidt coefficients).
class SchmidtVector {
 public:
  SchmidtVector() = default;

  /// Validates ordering, sign and normalization; throws DomainError.
  explicit SchmidtVector(std::vector<double> values);

  /// Sorts descending before validating.
  static SchmidtVector sorted(std::vector<double> values);

  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }
  double operator[](std::size_t i) const { return values_[i]; }
  const std::vector<double>& values() const { return values_; }
  auto begin() const { return values_.begin(); }
  auto end() const { return values_.end(); }

  /// Number of coefficients above `tol`.
  std::size_t rank(double tol = 1e-14) const;

  /// Zero-padded copy of length n (n >= size()).
  SchmidtVector padded(std::size_t n) const;

  bool operator==(const SchmidtVector&) const = default;

 private:
  std::vector<double> values_;
};

/// Schmidt vector of the tensor product of two states, sorted descending.
SchmidtVector sorted_tensor(const SchmidtVector& a, const SchmidtVector& b);

}  // namespace ecsim
