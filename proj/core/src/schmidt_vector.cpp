#include "ecsim/schmidt_vector.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <string>

#include "ecsim/errors.hpp"

namespace ecsim {

namespace {
constexpr double kSignSlack = 1e-14;
constexpr double kSumTol = 1e-12;
}  // namespace

SchmidtVector::SchmidtVector(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw DomainError("SchmidtVector: empty");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!(values_[i] >= -kSignSlack))
      throw DomainError("SchmidtVector: negative or non-finite entry at " + std::to_string(i));
    values_[i] = std::max(values_[i], 0.0);
    if (i > 0 && values_[i] > values_[i - 1] + kSignSlack)
      throw DomainError("SchmidtVector: entries not descending at " + std::to_string(i));
  }
  const double total = std::accumulate(values_.begin(), values_.end(), 0.0);
  if (std::abs(total - 1.0) > kSumTol)
    throw DomainError("SchmidtVector: entries sum to " + std::to_string(total));
}

SchmidtVector SchmidtVector::sorted(std::vector<double> values) {
  std::stable_sort(values.begin(), values.end(), std::greater<>());
  return SchmidtVector(std::move(values));
}

std::size_t SchmidtVector::rank(double tol) const {
  return static_cast<std::size_t>(
      std::count_if(values_.begin(), values_.end(), [tol](double v) { return v > tol; }));
}

SchmidtVector SchmidtVector::padded(std::size_t n) const {
  if (n < values_.size()) throw DomainError("SchmidtVector::padded: cannot shrink");
  std::vector<double> out = values_;
  out.resize(n, 0.0);
  return SchmidtVector(std::move(out));
}

SchmidtVector sorted_tensor(const SchmidtVector& a, const SchmidtVector& b) {
  std::vector<double> out;
  out.reserve(a.size() * b.size());
  for (double x : a)
    for (double y : b) out.push_back(x * y);
  return SchmidtVector::sorted(std::move(out));
}

}  // namespace ecsim
