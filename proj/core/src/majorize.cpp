#include "ecsim/majorize.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <string>

#include "ecsim/errors.hpp"

namespace ecsim::majorize {

namespace {

constexpr double kZero = 1e-13;

std::pair<std::vector<double>, std::vector<double>> pad_pair(const SchmidtVector& a,
                                                             const SchmidtVector& b) {
  const std::size_t n = std::max(a.size(), b.size());
  std::vector<double> x = a.values();
  std::vector<double> y = b.values();
  x.resize(n, 0.0);
  y.resize(n, 0.0);
  return {std::move(x), std::move(y)};
}

// tails[l] = sum_{i >= l} v_i, tails[n] = 0; accumulated from the end so
// small tails keep their relative precision.
std::vector<double> tail_sums(std::span<const double> v) {
  std::vector<double> tails(v.size() + 1, 0.0);
  for (std::size_t l = v.size(); l-- > 0;) tails[l] = tails[l + 1] + v[l];
  return tails;
}

// Kuhn's augmenting-path matching restricted to allowed[i][j] and to the
// unfixed rows/columns.
class Matcher {
 public:
  explicit Matcher(std::size_t d) : d_(d) {}

  bool perfect(const std::vector<std::vector<char>>& allowed, const std::vector<char>& row_used,
               const std::vector<char>& col_used) {
    match_col_.assign(d_, npos);
    for (std::size_t r = 0; r < d_; ++r) {
      if (row_used[r]) continue;
      seen_.assign(d_, 0);
      if (!augment(r, allowed, col_used)) return false;
    }
    return true;
  }

 private:
  static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

  bool augment(std::size_t r, const std::vector<std::vector<char>>& allowed,
               const std::vector<char>& col_used) {
    for (std::size_t c = 0; c < d_; ++c) {
      if (!allowed[r][c] || col_used[c] || seen_[c]) continue;
      seen_[c] = 1;
      if (match_col_[c] == npos || augment(match_col_[c], allowed, col_used)) {
        match_col_[c] = r;
        return true;
      }
    }
    return false;
  }

  std::size_t d_;
  std::vector<std::size_t> match_col_;
  std::vector<char> seen_;
};

std::vector<std::vector<char>> threshold_graph(const Eigen::MatrixXd& m, double tau) {
  const auto d = static_cast<std::size_t>(m.rows());
  std::vector<std::vector<char>> g(d, std::vector<char>(d, 0));
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j)
      g[i][j] = m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) >= tau ? 1 : 0;
  return g;
}

// Lexicographically smallest perfect matching of `allowed`, or empty.
Permutation smallest_matching(const std::vector<std::vector<char>>& allowed) {
  const std::size_t d = allowed.size();
  Matcher matcher(d);
  std::vector<char> row_used(d, 0);
  std::vector<char> col_used(d, 0);
  if (!matcher.perfect(allowed, row_used, col_used)) return {};
  Permutation perm(d);
  for (std::size_t r = 0; r < d; ++r) {
    row_used[r] = 1;
    bool placed = false;
    for (std::size_t c = 0; c < d && !placed; ++c) {
      if (!allowed[r][c] || col_used[c]) continue;
      col_used[c] = 1;
      if (matcher.perfect(allowed, row_used, col_used)) {
        perm[r] = c;
        placed = true;
      } else {
        col_used[c] = 0;
      }
    }
    if (!placed) return {};
  }
  return perm;
}

}  // namespace

// --- types ------------------------------------------------------------------

DoublyStochastic::DoublyStochastic(Eigen::MatrixXd matrix) : matrix_(std::move(matrix)) {
  if (matrix_.rows() != matrix_.cols() || matrix_.rows() == 0)
    throw DomainError("DoublyStochastic: matrix must be square and non-empty");
  if (!matrix_.allFinite()) throw DomainError("DoublyStochastic: non-finite entry");
  if (matrix_.minCoeff() < -kStochasticTol) throw DomainError("DoublyStochastic: negative entry");
  matrix_ = matrix_.cwiseMax(0.0);
  const double row_err = (matrix_.rowwise().sum().array() - 1.0).abs().maxCoeff();
  const double col_err = (matrix_.colwise().sum().array() - 1.0).abs().maxCoeff();
  if (row_err > kStochasticTol || col_err > kStochasticTol)
    throw DomainError("DoublyStochastic: rows/columns do not sum to 1");
}

DoublyStochastic DoublyStochastic::identity(std::size_t d) {
  const auto n = static_cast<Eigen::Index>(d);
  return DoublyStochastic(Eigen::MatrixXd::Identity(n, n));
}

Eigen::MatrixXd TTransform::matrix(std::size_t d) const {
  if (j >= d || k >= d || j == k) throw DomainError("TTransform: bad coordinates");
  const auto n = static_cast<Eigen::Index>(d);
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n);
  const auto a = static_cast<Eigen::Index>(j);
  const auto b = static_cast<Eigen::Index>(k);
  m(a, a) = t;
  m(b, b) = t;
  m(a, b) = 1.0 - t;
  m(b, a) = 1.0 - t;
  return m;
}

void TTransform::apply(std::span<double> v) const {
  const double a = v[j];
  const double b = v[k];
  v[j] = t * a + (1.0 - t) * b;
  v[k] = (1.0 - t) * a + t * b;
}

Eigen::MatrixXd BirkhoffDecomposition::reconstruct(std::size_t d) const {
  const auto n = static_cast<Eigen::Index>(d);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (const auto& term : terms)
    for (std::size_t i = 0; i < term.perm.size(); ++i)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(term.perm[i])) += term.weight;
  return m;
}

// --- majorization -----------------------------------------------------------

bool is_majorized_ordered(std::span<const double> alpha, std::span<const double> beta) {
  if (alpha.size() != beta.size()) throw DomainError("is_majorized: length mismatch");
  double sa = 0.0;
  double sb = 0.0;
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    sa += alpha[i];
    sb += beta[i];
    if (sa > sb + kMajorizationSlack) return false;
  }
  return std::abs(sa - sb) <= kMajorizationSlack;
}

bool is_majorized(const SchmidtVector& alpha, const SchmidtVector& beta) {
  const auto [x, y] = pad_pair(alpha, beta);
  return is_majorized_ordered(x, y);
}

ConversionCheck check_conversion(const SchmidtVector& alpha, const SchmidtVector& beta) {
  if (alpha.rank() < beta.rank()) return {0.0, ConversionStatus::rank_deficient};
  if (is_majorized(alpha, beta)) return {1.0, ConversionStatus::ok};
  const auto [x, y] = pad_pair(alpha, beta);
  const auto ea = tail_sums(x);
  const auto eb = tail_sums(y);
  double p = 1.0;
  for (std::size_t l = 0; l < x.size(); ++l) {
    if (eb[l] <= kZero) continue;
    p = std::min(p, ea[l] / eb[l]);
  }
  return {std::clamp(p, 0.0, 1.0), ConversionStatus::ok};
}

double vidal_probability(const SchmidtVector& alpha, const SchmidtVector& beta) {
  return check_conversion(alpha, beta).probability;
}

SchmidtVector vidal_intermediate(const SchmidtVector& alpha, const SchmidtVector& beta) {
  if (alpha.rank() < beta.rank())
    throw DomainError("vidal_intermediate: Schmidt rank of the initial state is too small");
  const auto [x, y] = pad_pair(alpha, beta);
  if (is_majorized_ordered(x, y)) return SchmidtVector(y);

  // Blocks are peeled off from the tail: each block [l, end) takes
  // gamma = r * beta with r the smallest partial tail ratio over [0, end),
  // attained at its largest index l. The first r is the conversion
  // probability; later ratios only grow.
  const auto ea = tail_sums(x);
  const auto eb = tail_sums(y);
  std::vector<double> gamma(x.size(), 0.0);
  std::size_t end = x.size();
  while (end > 0) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t l = 0; l < end; ++l) {
      const double db = eb[l] - eb[end];
      if (db <= kZero) continue;
      best = std::min(best, (ea[l] - ea[end]) / db);
    }
    std::size_t split = 0;
    for (std::size_t l = 0; l < end; ++l) {
      const double db = eb[l] - eb[end];
      if (db <= kZero) continue;
      if ((ea[l] - ea[end]) / db <= best * (1.0 + 1e-12)) split = l;
    }
    for (std::size_t i = split; i < end; ++i) gamma[i] = best * y[i];
    end = split;
  }
  return SchmidtVector(std::move(gamma));
}

// --- T-transforms -----------------------------------------------------------

std::vector<TTransform> t_transform_decompose(std::span<const double> alpha,
                                              std::span<const double> beta) {
  if (!is_majorized_ordered(alpha, beta))
    throw DomainError("t_transform_decompose: majorization violated");
  const std::size_t d = alpha.size();
  std::vector<double> y(beta.begin(), beta.end());
  std::vector<TTransform> out;
  while (out.size() < d) {
    std::size_t j = d;
    for (std::size_t i = 0; i < d; ++i)
      if (y[i] - alpha[i] > kZero) {
        j = i;
        break;
      }
    if (j == d) break;
    std::size_t k = d;
    for (std::size_t i = j + 1; i < d; ++i)
      if (alpha[i] - y[i] > kZero) {
        k = i;
        break;
      }
    if (k == d) throw NumericalError("t_transform_decompose: no deficit coordinate found");
    const double surplus = y[j] - alpha[j];
    const double deficit = alpha[k] - y[k];
    const double delta = std::min(surplus, deficit);
    const double gap = y[j] - y[k];
    if (!(gap > 0)) throw NumericalError("t_transform_decompose: non-positive transfer gap");
    TTransform tt{j, k, std::clamp(1.0 - delta / gap, 0.0, 1.0)};
    tt.apply(y);
    if (surplus <= deficit) y[j] = alpha[j];
    if (deficit <= surplus) y[k] = alpha[k];
    out.push_back(tt);
  }
  for (std::size_t i = 0; i < d; ++i)
    if (std::abs(y[i] - alpha[i]) > kStochasticTol)
      throw NumericalError("t_transform_decompose: chain does not reach the target");
  if (d > 0 && out.size() > d - 1) throw NumericalError("t_transform_decompose: too many transforms");
  return out;
}

std::vector<TTransform> t_transform_decompose(const SchmidtVector& alpha, const SchmidtVector& beta) {
  const auto [x, y] = pad_pair(alpha, beta);
  return t_transform_decompose(std::span<const double>(x), std::span<const double>(y));
}

DoublyStochastic build_doubly_stochastic(const SchmidtVector& alpha, const SchmidtVector& beta) {
  const auto [x, y] = pad_pair(alpha, beta);
  const auto ts = t_transform_decompose(std::span<const double>(x), std::span<const double>(y));
  const auto n = static_cast<Eigen::Index>(x.size());
  Eigen::MatrixXd d = Eigen::MatrixXd::Identity(n, n);
  for (const auto& t : ts) d = t.matrix(x.size()) * d;
  return DoublyStochastic(std::move(d));
}

std::vector<DoublyStochastic> group_ttransforms(std::span<const TTransform> ts, std::size_t d,
                                                std::size_t group_size) {
  if (group_size == 0) throw DomainError("group_ttransforms: group size must be >= 1");
  std::vector<DoublyStochastic> out;
  const auto n = static_cast<Eigen::Index>(d);
  for (std::size_t start = 0; start < ts.size(); start += group_size) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n);
    const std::size_t stop = std::min(ts.size(), start + group_size);
    for (std::size_t i = start; i < stop; ++i) m = ts[i].matrix(d) * m;
    out.emplace_back(std::move(m));
  }
  return out;
}

// --- Birkhoff ---------------------------------------------------------------

BirkhoffDecomposition birkhoff_decompose(const DoublyStochastic& D) {
  const std::size_t d = D.dim();
  Eigen::MatrixXd residual = D.matrix();
  BirkhoffDecomposition out;
  const std::size_t max_terms = (d - 1) * (d - 1) + 1;

  while (residual.maxCoeff() > 1e-12) {
    if (out.terms.size() >= d * d)
      throw NumericalError("birkhoff_decompose: extraction did not terminate");
    std::vector<double> levels;
    for (Eigen::Index i = 0; i < residual.size(); ++i)
      if (residual.data()[i] > kZero) levels.push_back(residual.data()[i]);
    std::sort(levels.begin(), levels.end(), std::greater<>());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());

    // Largest threshold whose support graph still has a perfect matching.
    std::size_t lo = 0;
    std::size_t hi = levels.size() - 1;
    Matcher matcher(d);
    const std::vector<char> none(d, 0);
    if (!matcher.perfect(threshold_graph(residual, levels[hi]), none, none))
      throw NumericalError("birkhoff_decompose: residual has no perfect matching");
    while (lo < hi) {
      const std::size_t mid = (lo + hi) / 2;
      if (matcher.perfect(threshold_graph(residual, levels[mid]), none, none))
        hi = mid;
      else
        lo = mid + 1;
    }
    const Permutation perm = smallest_matching(threshold_graph(residual, levels[lo]));
    if (perm.empty()) throw NumericalError("birkhoff_decompose: matching failed");

    double weight = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < d; ++i)
      weight = std::min(weight, residual(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(perm[i])));
    for (std::size_t i = 0; i < d; ++i) {
      double& e = residual(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(perm[i]));
      e -= weight;
      if (e < kZero) e = 0.0;
    }
    out.terms.push_back({weight, perm});
  }
  if (out.terms.size() > max_terms)
    throw NumericalError("birkhoff_decompose: term count exceeds (d-1)^2+1");
  return out;
}

}  // namespace ecsim::majorize
