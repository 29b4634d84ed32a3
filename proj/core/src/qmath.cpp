#include "ecsim/qmath.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <string>

#include "ecsim/errors.hpp"

namespace ecsim::qmath {

namespace {

// Index bookkeeping for acting on a subset of qubits: `offsets[s]` is the
// register index contribution of local basis state s, `bases` enumerates the
// register indices with all acted-on bits cleared.
struct Gather {
  std::vector<std::size_t> offsets;
  std::vector<std::size_t> bases;
};

Gather make_gather(std::span<const std::size_t> positions, std::size_t n_qubits) {
  const std::size_t k = positions.size();
  std::size_t mask = 0;
  for (std::size_t p : positions) {
    if (p >= n_qubits) throw DomainError("qubit position out of range");
    const std::size_t bit = std::size_t{1} << (n_qubits - 1 - p);
    if (mask & bit) throw DomainError("repeated qubit position");
    mask |= bit;
  }
  Gather g;
  g.offsets.resize(std::size_t{1} << k);
  for (std::size_t s = 0; s < g.offsets.size(); ++s) {
    std::size_t off = 0;
    for (std::size_t t = 0; t < k; ++t)
      if ((s >> (k - 1 - t)) & 1U) off |= std::size_t{1} << (n_qubits - 1 - positions[t]);
    g.offsets[s] = off;
  }
  const std::size_t dim = std::size_t{1} << n_qubits;
  g.bases.reserve(dim >> k);
  for (std::size_t idx = 0; idx < dim; ++idx)
    if ((idx & mask) == 0) g.bases.push_back(idx);
  return g;
}

// op * m, op acting on the row index.
ComplexMatrix left_apply(const ComplexMatrix& m, const ComplexMatrix& op, const Gather& g) {
  const auto local = static_cast<Eigen::Index>(g.offsets.size());
  ComplexMatrix out(m.rows(), m.cols());
  ComplexVector v(local);
  ComplexVector w(local);
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    for (std::size_t b : g.bases) {
      for (Eigen::Index s = 0; s < local; ++s)
        v(s) = m(static_cast<Eigen::Index>(b + g.offsets[static_cast<std::size_t>(s)]), c);
      w.noalias() = op * v;
      for (Eigen::Index s = 0; s < local; ++s)
        out(static_cast<Eigen::Index>(b + g.offsets[static_cast<std::size_t>(s)]), c) = w(s);
    }
  }
  return out;
}

double hermitian_deviation(const ComplexMatrix& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

void check_operator_shape(const ComplexMatrix& op, std::size_t k) {
  const auto expect = static_cast<Eigen::Index>(std::size_t{1} << k);
  if (op.rows() != expect || op.cols() != expect)
    throw DomainError("operator dimension does not match the number of target qubits");
}

// Phase convention: the largest-magnitude amplitude is real and positive.
ComplexVector fix_phase(ComplexVector v) {
  Eigen::Index best = 0;
  double best_abs = -1.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double a = std::abs(v(i));
    if (a > best_abs + 1e-12) {
      best_abs = a;
      best = i;
    }
  }
  if (best_abs > 0) v *= std::conj(v(best)) / best_abs;
  return v;
}

std::vector<std::size_t> sorted_positions(const Layout& layout, std::span<const std::string> labels) {
  std::vector<std::size_t> pos = layout.indices_of(labels);
  std::sort(pos.begin(), pos.end());
  return pos;
}

Layout sub_layout(const Layout& layout, std::span<const std::size_t> positions) {
  std::vector<Qubit> qs;
  qs.reserve(positions.size());
  for (std::size_t p : positions) qs.push_back(layout[p]);
  return Layout(std::move(qs));
}

// Maps every basis index of `from` to the index of the same basis state in
// `to`; both layouts hold the same labels.
std::vector<std::size_t> index_map(const Layout& from, const Layout& to) {
  const std::size_t n = from.size();
  if (to.size() != n) throw DomainError("reorder: layouts differ in size");
  std::vector<std::size_t> src_of_dst(n);
  for (std::size_t p = 0; p < n; ++p) src_of_dst[p] = from.index_of(to[p].label);
  std::vector<std::size_t> map(from.dim());
  for (std::size_t idx = 0; idx < map.size(); ++idx) {
    std::size_t out = 0;
    for (std::size_t p = 0; p < n; ++p)
      if ((idx >> (n - 1 - src_of_dst[p])) & 1U) out |= std::size_t{1} << (n - 1 - p);
    map[idx] = out;
  }
  return map;
}

bool same_label_set(const Layout& a, const Layout& b) {
  if (a.size() != b.size()) return false;
  for (const auto& q : a.qubits())
    if (!b.contains(q.label)) return false;
  return true;
}

}  // namespace

// --- Layout -----------------------------------------------------------------

Layout::Layout(std::vector<Qubit> qubits) : qubits_(std::move(qubits)) {
  std::set<std::string> seen;
  for (const auto& q : qubits_)
    if (!seen.insert(q.label).second) throw DomainError("duplicate qubit label: " + q.label);
}

bool Layout::contains(const std::string& label) const {
  return std::any_of(qubits_.begin(), qubits_.end(), [&](const Qubit& q) { return q.label == label; });
}

std::size_t Layout::index_of(const std::string& label) const {
  for (std::size_t i = 0; i < qubits_.size(); ++i)
    if (qubits_[i].label == label) return i;
  throw DomainError("unknown subsystem label: " + label);
}

std::vector<std::size_t> Layout::indices_of(std::span<const std::string> labels) const {
  std::vector<std::size_t> out;
  out.reserve(labels.size());
  for (const auto& l : labels) out.push_back(index_of(l));
  return out;
}

std::vector<std::string> Layout::labels(Party party, bool with_aux) const {
  std::vector<std::string> out;
  for (const auto& q : qubits_)
    if (q.party == party && (with_aux || q.role != Role::auxiliary)) out.push_back(q.label);
  return out;
}

std::vector<std::string> Layout::aux_labels(Party party) const {
  std::vector<std::string> out;
  for (const auto& q : qubits_)
    if (q.party == party && q.role == Role::auxiliary) out.push_back(q.label);
  return out;
}

std::vector<std::string> Layout::all_labels() const {
  std::vector<std::string> out;
  for (const auto& q : qubits_) out.push_back(q.label);
  return out;
}

Layout concat(const Layout& a, const Layout& b) {
  std::vector<Qubit> qs = a.qubits();
  qs.insert(qs.end(), b.qubits().begin(), b.qubits().end());
  return Layout(std::move(qs));
}

Layout pair_layout(const std::string& alice, const std::string& bob, Role role) {
  return Layout({Qubit{alice, Party::alice, role}, Qubit{bob, Party::bob, role}});
}

// --- PureState --------------------------------------------------------------

PureState::PureState(Layout layout, ComplexVector amplitudes)
    : layout_(std::move(layout)), amplitudes_(std::move(amplitudes)) {
  if (static_cast<std::size_t>(amplitudes_.size()) != layout_.dim())
    throw DomainError("PureState: amplitude count does not match layout");
  if (!amplitudes_.allFinite()) throw DomainError("PureState: non-finite amplitude");
  const double norm2 = amplitudes_.squaredNorm();
  if (std::abs(norm2 - 1.0) > kNormTol)
    throw DomainError("PureState: squared norm " + std::to_string(norm2) + " is not 1");
  amplitudes_ /= std::sqrt(norm2);
}

PureState PureState::normalized(Layout layout, ComplexVector amplitudes) {
  const double n = amplitudes.norm();
  if (!(n > 0)) throw DomainError("PureState::normalized: zero vector");
  return PureState(std::move(layout), amplitudes / n);
}

PureState PureState::basis(Layout layout, std::size_t index) {
  ComplexVector v = ComplexVector::Zero(static_cast<Eigen::Index>(layout.dim()));
  if (index >= layout.dim()) throw DomainError("PureState::basis: index out of range");
  v(static_cast<Eigen::Index>(index)) = 1.0;
  return PureState(std::move(layout), std::move(v));
}

PureState PureState::relabeled(Layout layout) const {
  if (layout.size() != layout_.size()) throw DomainError("relabeled: size mismatch");
  return PureState(std::move(layout), amplitudes_);
}

// --- DensityMatrix ----------------------------------------------------------

DensityMatrix::DensityMatrix(Layout layout, ComplexMatrix matrix)
    : layout_(std::move(layout)), matrix_(std::move(matrix)) {
  const auto dim = static_cast<Eigen::Index>(layout_.dim());
  if (matrix_.rows() != dim || matrix_.cols() != dim)
    throw DomainError("DensityMatrix: shape does not match layout");
  if (!matrix_.allFinite()) throw DomainError("DensityMatrix: non-finite entry");
  if (hermitian_deviation(matrix_) > kStructuralTol)
    throw NumericalError("DensityMatrix: not Hermitian");
  matrix_ = (0.5 * (matrix_ + matrix_.adjoint())).eval();
  const double tr = matrix_.trace().real();
  if (std::abs(tr - 1.0) > kStructuralTol)
    throw NumericalError("DensityMatrix: trace " + std::to_string(tr) + " is not 1");
  matrix_ /= tr;
}

DensityMatrix DensityMatrix::from_pure(const PureState& psi) {
  return DensityMatrix(psi.layout(), psi.amplitudes() * psi.amplitudes().adjoint());
}

DensityMatrix DensityMatrix::maximally_mixed(Layout layout) {
  const auto dim = static_cast<Eigen::Index>(layout.dim());
  ComplexMatrix m = ComplexMatrix::Identity(dim, dim) / static_cast<double>(dim);
  return DensityMatrix(std::move(layout), std::move(m));
}

void DensityMatrix::validate() const {
  if (hermitian_deviation(matrix_) > kNormTol) throw NumericalError("DensityMatrix: not Hermitian");
  if (std::abs(matrix_.trace().real() - 1.0) > kNormTol ||
      std::abs(matrix_.trace().imag()) > kNormTol)
    throw NumericalError("DensityMatrix: trace is not 1");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(matrix_, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -kStructuralTol)
    throw NumericalError("DensityMatrix: negative eigenvalue " +
                         std::to_string(es.eigenvalues().minCoeff()));
}

DensityMatrix DensityMatrix::relabeled(Layout layout) const {
  if (layout.size() != layout_.size()) throw DomainError("relabeled: size mismatch");
  return DensityMatrix(std::move(layout), matrix_);
}

// --- SchmidtDecomposition ---------------------------------------------------

PureState SchmidtDecomposition::reconstruct() const {
  const Layout joint = concat(left, right);
  ComplexVector psi = ComplexVector::Zero(static_cast<Eigen::Index>(joint.dim()));
  for (std::size_t i = 0; i < coefficients.size(); ++i) {
    if (coefficients[i] == 0.0) continue;
    const auto col = static_cast<Eigen::Index>(i);
    ComplexMatrix l = left_basis.col(col);
    ComplexMatrix r = right_basis.col(col);
    psi += std::sqrt(coefficients[i]) * tensor(l, r).col(0);
  }
  return PureState::normalized(joint, psi);
}

// --- matrices ---------------------------------------------------------------

ComplexMatrix pauli_x() {
  ComplexMatrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

ComplexMatrix pauli_y() {
  ComplexMatrix m(2, 2);
  m << 0, Complex(0, -1), Complex(0, 1), 0;
  return m;
}

ComplexMatrix pauli_z() {
  ComplexMatrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

ComplexMatrix hadamard() {
  ComplexMatrix m(2, 2);
  m << 1, 1, 1, -1;
  return m / std::sqrt(2.0);
}

ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

PureState tensor(const PureState& a, const PureState& b) {
  ComplexMatrix col = tensor(ComplexMatrix(a.amplitudes()), ComplexMatrix(b.amplitudes()));
  return PureState::normalized(concat(a.layout(), b.layout()), col.col(0));
}

DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b) {
  return DensityMatrix(concat(a.layout(), b.layout()), tensor(a.matrix(), b.matrix()));
}

Eigen::MatrixXd permutation_matrix(std::span<const std::size_t> perm) {
  const auto d = static_cast<Eigen::Index>(perm.size());
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    if (perm[static_cast<std::size_t>(i)] >= perm.size()) throw DomainError("invalid permutation");
    p(i, static_cast<Eigen::Index>(perm[static_cast<std::size_t>(i)])) = 1.0;
  }
  return p;
}

// --- raw operator application ----------------------------------------------

ComplexMatrix conjugate(const ComplexMatrix& rho, const ComplexMatrix& op,
                        std::span<const std::size_t> positions, std::size_t n_qubits) {
  check_operator_shape(op, positions.size());
  const Gather g = make_gather(positions, n_qubits);
  const ComplexMatrix half = left_apply(rho, op, g);
  return left_apply(half.adjoint(), op, g).adjoint();
}

ComplexVector apply(const ComplexVector& psi, const ComplexMatrix& op,
                    std::span<const std::size_t> positions, std::size_t n_qubits) {
  check_operator_shape(op, positions.size());
  const Gather g = make_gather(positions, n_qubits);
  return left_apply(ComplexMatrix(psi), op, g).col(0);
}

DensityMatrix apply_operator(const DensityMatrix& rho, const ComplexMatrix& op,
                             std::span<const std::string> on) {
  const auto pos = rho.layout().indices_of(on);
  return DensityMatrix(rho.layout(), conjugate(rho.matrix(), op, pos, rho.layout().size()));
}

PureState apply_operator(const PureState& psi, const ComplexMatrix& op,
                         std::span<const std::string> on) {
  const auto pos = psi.layout().indices_of(on);
  return PureState::normalized(psi.layout(), apply(psi.amplitudes(), op, pos, psi.layout().size()));
}

// --- state operations -------------------------------------------------------

DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const std::string> keep) {
  const Layout& layout = rho.layout();
  const std::vector<std::size_t> pos = sorted_positions(layout, keep);
  if (std::adjacent_find(pos.begin(), pos.end()) != pos.end())
    throw DomainError("partial_trace: repeated label");
  const Gather g = make_gather(pos, layout.size());
  const auto kd = static_cast<Eigen::Index>(g.offsets.size());
  ComplexMatrix red = ComplexMatrix::Zero(kd, kd);
  const ComplexMatrix& m = rho.matrix();
  for (std::size_t b : g.bases)
    for (Eigen::Index j = 0; j < kd; ++j)
      for (Eigen::Index i = 0; i < kd; ++i)
        red(i, j) += m(static_cast<Eigen::Index>(b + g.offsets[static_cast<std::size_t>(i)]),
                       static_cast<Eigen::Index>(b + g.offsets[static_cast<std::size_t>(j)]));
  return DensityMatrix(sub_layout(layout, pos), std::move(red));
}

DensityMatrix reorder(const DensityMatrix& rho, const Layout& target) {
  if (rho.layout() == target) return rho;
  const auto map = index_map(rho.layout(), target);
  const auto dim = static_cast<Eigen::Index>(map.size());
  ComplexMatrix out(dim, dim);
  for (Eigen::Index j = 0; j < dim; ++j)
    for (Eigen::Index i = 0; i < dim; ++i)
      out(static_cast<Eigen::Index>(map[static_cast<std::size_t>(i)]),
          static_cast<Eigen::Index>(map[static_cast<std::size_t>(j)])) = rho.matrix()(i, j);
  return DensityMatrix(target, std::move(out));
}

PureState reorder(const PureState& psi, const Layout& target) {
  if (psi.layout() == target) return psi;
  const auto map = index_map(psi.layout(), target);
  ComplexVector out(static_cast<Eigen::Index>(map.size()));
  for (std::size_t i = 0; i < map.size(); ++i)
    out(static_cast<Eigen::Index>(map[i])) = psi.amplitudes()(static_cast<Eigen::Index>(i));
  return PureState(target, std::move(out));
}

SchmidtDecomposition schmidt_decompose(const PureState& psi, std::span<const std::string> left) {
  const Layout& layout = psi.layout();
  const std::vector<std::size_t> lpos = sorted_positions(layout, left);
  std::vector<std::size_t> rpos;
  for (std::size_t p = 0; p < layout.size(); ++p)
    if (!std::binary_search(lpos.begin(), lpos.end(), p)) rpos.push_back(p);
  if (lpos.empty() || rpos.empty()) throw DomainError("schmidt_decompose: cut leaves a side empty");

  SchmidtDecomposition out;
  out.left = sub_layout(layout, lpos);
  out.right = sub_layout(layout, rpos);
  const PureState ordered = reorder(psi, concat(out.left, out.right));

  const auto dl = static_cast<Eigen::Index>(out.left.dim());
  const auto dr = static_cast<Eigen::Index>(out.right.dim());
  ComplexMatrix amp(dl, dr);
  for (Eigen::Index a = 0; a < dl; ++a)
    for (Eigen::Index b = 0; b < dr; ++b) amp(a, b) = ordered.amplitudes()(a * dr + b);

  Eigen::JacobiSVD<ComplexMatrix> svd(amp, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  std::vector<double> coeffs(static_cast<std::size_t>(sv.size()));
  double total = 0.0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    coeffs[static_cast<std::size_t>(i)] = sv(i) * sv(i);
    total += coeffs[static_cast<std::size_t>(i)];
  }
  for (double& c : coeffs) c /= total;
  out.coefficients = SchmidtVector(std::move(coeffs));
  out.left_basis = svd.matrixU();
  out.right_basis = svd.matrixV().conjugate();
  return out;
}

SchmidtDecomposition schmidt_decompose(const PureState& psi) {
  return schmidt_decompose(psi, psi.layout().labels(Party::alice, true));
}

SchmidtDecomposition schmidt_product(const SchmidtDecomposition& a, const SchmidtDecomposition& b) {
  const auto square = [](const SchmidtDecomposition& s) {
    return static_cast<Eigen::Index>(s.coefficients.size()) == s.left_basis.cols() &&
           s.left_basis.cols() == s.right_basis.cols();
  };
  if (!square(a) || !square(b)) throw DomainError("schmidt_product: factors must have equal-sized parties");

  const std::size_t na = a.coefficients.size();
  const std::size_t nb = b.coefficients.size();
  std::vector<std::size_t> order(na * nb);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<double> prod(na * nb);
  for (std::size_t i = 0; i < na; ++i)
    for (std::size_t j = 0; j < nb; ++j) prod[i * nb + j] = a.coefficients[i] * b.coefficients[j];
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return prod[x] > prod[y]; });

  const ComplexMatrix lk = tensor(a.left_basis, b.left_basis);
  const ComplexMatrix rk = tensor(a.right_basis, b.right_basis);
  SchmidtDecomposition out;
  out.left = concat(a.left, b.left);
  out.right = concat(a.right, b.right);
  out.left_basis.resize(lk.rows(), lk.cols());
  out.right_basis.resize(rk.rows(), rk.cols());
  std::vector<double> coeffs(order.size());
  for (std::size_t c = 0; c < order.size(); ++c) {
    coeffs[c] = prod[order[c]];
    out.left_basis.col(static_cast<Eigen::Index>(c)) = lk.col(static_cast<Eigen::Index>(order[c]));
    out.right_basis.col(static_cast<Eigen::Index>(c)) = rk.col(static_cast<Eigen::Index>(order[c]));
  }
  const double total = std::accumulate(coeffs.begin(), coeffs.end(), 0.0);
  for (double& c : coeffs) c /= total;
  out.coefficients = SchmidtVector(std::move(coeffs));
  return out;
}

double fidelity(const DensityMatrix& rho, const PureState& target) {
  if (rho.dim() != target.dim()) throw DomainError("fidelity: dimension mismatch");
  const PureState* t = &target;
  PureState reordered;
  if (rho.layout() != target.layout() && same_label_set(rho.layout(), target.layout())) {
    reordered = reorder(target, rho.layout());
    t = &reordered;
  }
  const ComplexVector& v = t->amplitudes();
  const double f = (v.adjoint() * rho.matrix() * v)(0, 0).real();
  return std::clamp(f, 0.0, 1.0);
}

double fidelity(const PureState& a, const PureState& b) {
  return fidelity(DensityMatrix::from_pure(a), b);
}

TopEigenstate top_eigenstate(const DensityMatrix& rho) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(rho.matrix());
  if (es.info() != Eigen::Success) throw NumericalError("top_eigenstate: eigensolver failed");
  const auto n = es.eigenvalues().size();
  TopEigenstate out;
  out.eigenvalue = es.eigenvalues()(n - 1);
  ComplexVector v = es.eigenvectors().col(n - 1);

  if (n > 1 && out.eigenvalue - es.eigenvalues()(n - 2) < 1e-9) {
    out.degenerate = true;
    // Projector onto the degenerate top eigenspace.
    ComplexMatrix basis(rho.matrix().rows(), 0);
    for (Eigen::Index i = n - 1; i >= 0 && out.eigenvalue - es.eigenvalues()(i) < 1e-9; --i) {
      basis.conservativeResize(Eigen::NoChange, basis.cols() + 1);
      basis.col(basis.cols() - 1) = es.eigenvectors().col(i);
    }
    // Reference vectors, in preference order: the maximally correlated state
    // across the Alice/Bob cut, then the computational basis.
    std::vector<ComplexVector> refs;
    const auto alice = rho.layout().labels(Party::alice, true);
    const auto bob = rho.layout().labels(Party::bob, true);
    if (!alice.empty() && alice.size() == bob.size()) {
      std::vector<Qubit> ordered;
      for (const auto& l : alice) ordered.push_back(rho.layout()[rho.layout().index_of(l)]);
      for (const auto& l : bob) ordered.push_back(rho.layout()[rho.layout().index_of(l)]);
      const Layout split(ordered);
      const std::size_t d = std::size_t{1} << alice.size();
      ComplexVector mc = ComplexVector::Zero(static_cast<Eigen::Index>(split.dim()));
      for (std::size_t i = 0; i < d; ++i) mc(static_cast<Eigen::Index>(i * d + i)) = 1.0;
      refs.push_back(reorder(PureState::normalized(split, mc), rho.layout()).amplitudes());
    }
    for (Eigen::Index i = 0; i < rho.matrix().rows(); ++i)
      refs.push_back(ComplexVector::Unit(rho.matrix().rows(), i));
    for (const auto& r : refs) {
      ComplexVector proj = basis * (basis.adjoint() * r);
      if (proj.norm() > 1e-6) {
        v = proj / proj.norm();
        break;
      }
    }
  }

  v = fix_phase(v);
  const double residual = (rho.matrix() * v - out.eigenvalue * v).norm();
  if (residual > kStructuralTol) throw NumericalError("top_eigenstate: residual too large");
  out.state = PureState(rho.layout(), v);
  return out;
}

DensityMatrix apply_channel(const DensityMatrix& rho, std::span<const ComplexMatrix> kraus,
                            std::span<const std::string> on) {
  if (kraus.empty()) throw DomainError("apply_channel: empty Kraus set");
  const auto pos = rho.layout().indices_of(on);
  const auto local = static_cast<Eigen::Index>(std::size_t{1} << pos.size());
  ComplexMatrix completeness = ComplexMatrix::Zero(local, local);
  for (const auto& k : kraus) {
    check_operator_shape(k, pos.size());
    completeness += k.adjoint() * k;
  }
  if ((completeness - ComplexMatrix::Identity(local, local)).cwiseAbs().maxCoeff() > kStructuralTol)
    throw DomainError("apply_channel: Kraus operators are not complete");
  ComplexMatrix out = ComplexMatrix::Zero(rho.matrix().rows(), rho.matrix().cols());
  for (const auto& k : kraus) out += conjugate(rho.matrix(), k, pos, rho.layout().size());
  return DensityMatrix(rho.layout(), std::move(out));
}

}  // namespace ecsim::qmath
