#include "ecsim/locc.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "ecsim/errors.hpp"
#include "ecsim/noise.hpp"

namespace ecsim::locc {

using qmath::Complex;
using qmath::ComplexMatrix;
using qmath::DensityMatrix;
using qmath::Layout;
using qmath::Party;

namespace {

constexpr double kSupport = 1e-14;
constexpr double kBranchFloor = 1e-13;

std::size_t qubits_for(std::size_t dim) {
  std::size_t n = 0;
  while ((std::size_t{1} << n) < dim) ++n;
  return n;
}

// For every basis index of an n-qubit register, the index of the sub-register
// formed by `positions` (positions[0] most significant).
std::vector<std::size_t> sub_index(std::span<const std::size_t> positions, std::size_t n) {
  std::vector<std::size_t> out(std::size_t{1} << n, 0);
  for (std::size_t x = 0; x < out.size(); ++x) {
    std::size_t s = 0;
    for (std::size_t p : positions) s = (s << 1) | ((x >> (n - 1 - p)) & 1U);
    out[x] = s;
  }
  return out;
}

bool is_identity(const Permutation& perm) {
  for (std::size_t i = 0; i < perm.size(); ++i)
    if (perm[i] != i) return false;
  return true;
}

Permutation identity_perm(std::size_t d) {
  Permutation p(d);
  std::iota(p.begin(), p.end(), std::size_t{0});
  return p;
}

std::vector<std::string> aux_names(std::size_t count) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back("Aaux" + std::to_string(i));
  return out;
}

// Householder reflection taking e0 to v (unit vector, real).
Eigen::MatrixXd reflection_to(const Eigen::VectorXd& v) {
  const auto n = v.size();
  Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd w = -v;
  w(0) += 1.0;
  const double nw = w.squaredNorm();
  if (nw <= 1e-24) {
    Eigen::MatrixXd h = id;
    h(1, 1) = -1.0;
    return h;
  }
  return id - 2.0 * w * w.transpose() / nw;
}

Round make_round(DiagonalPOVM povm, std::span<const std::string> data_qubits, bool allow_multi,
                 std::vector<double> current, std::vector<double> target) {
  Round r;
  r.unitary = embed_povm(povm);
  const auto aux = aux_names(r.unitary.aux_count);
  r.synthesis = synthesize(r.unitary, data_qubits, aux, allow_multi);
  r.povm = std::move(povm);
  r.current = std::move(current);
  r.target = std::move(target);
  return r;
}

DensityMatrix normalized_branch(const Layout& layout, ComplexMatrix m, double weight) {
  m /= weight;
  return DensityMatrix(layout, std::move(m));
}

}  // namespace

// --- POVM -------------------------------------------------------------------

void DiagonalPOVM::validate() const {
  const std::size_t d = dim();
  if (elements.empty()) throw NumericalError("POVM has no elements");
  if (corrections.size() != elements.size() || weights.size() != elements.size())
    throw NumericalError("POVM: inconsistent outcome data");
  for (std::size_t j = 0; j < d; ++j) {
    double sum = 0.0;
    for (const auto& e : elements) {
      if (e.size() != d) throw NumericalError("POVM: element size mismatch");
      if (e[j] < -kSupport || e[j] > 1.0 + 1e-12) throw NumericalError("POVM: entry out of [0, 1]");
      sum += e[j];
    }
    if (std::abs(sum - 1.0) > 1e-10) throw NumericalError("POVM: completeness violated");
  }
  for (const auto& c : corrections) {
    if (c.size() != d) throw NumericalError("POVM: correction size mismatch");
    std::vector<char> seen(d, 0);
    for (std::size_t v : c) {
      if (v >= d || seen[v]) throw NumericalError("POVM: correction is not a permutation");
      seen[v] = 1;
    }
  }
}

namespace {

// Only the vectors P_m target matter to the POVM. Terms with equal vectors
// are merged, then Caratheodory elimination on the (d-1)-dimensional simplex
// leaves at most d of them.
majorize::BirkhoffDecomposition reduce_terms(majorize::BirkhoffDecomposition bk, std::span<const double> target) {
  const std::size_t d = target.size();
  const auto vec = [&](const majorize::BirkhoffTerm& t) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(d));
    for (std::size_t i = 0; i < d; ++i) v(static_cast<Eigen::Index>(i)) = target[t.perm[i]];
    return v;
  };
  std::vector<majorize::BirkhoffTerm> terms;
  for (auto& t : bk.terms) {
    const Eigen::VectorXd v = vec(t);
    auto same = std::find_if(terms.begin(), terms.end(), [&](const auto& u) { return (vec(u) - v).cwiseAbs().maxCoeff() <= 1e-15; });
    if (same != terms.end())
      same->weight += t.weight;
    else
      terms.push_back(std::move(t));
  }
  while (terms.size() > d) {
    const auto k = static_cast<Eigen::Index>(d + 1);
    Eigen::MatrixXd m(k, k);
    for (Eigen::Index c = 0; c < k; ++c) {
      m.col(c).head(k - 1) = vec(terms[static_cast<std::size_t>(c)]);
      m(k - 1, c) = 1.0;
    }
    const Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
    Eigen::VectorXd mu = lu.kernel().col(0);
    if (mu.maxCoeff() <= 0.0) mu = -mu;
    std::size_t drop = 0;
    double tau = std::numeric_limits<double>::infinity();
    for (Eigen::Index c = 0; c < k; ++c)
      if (mu(c) > 1e-14 && terms[static_cast<std::size_t>(c)].weight / mu(c) < tau) {
        tau = terms[static_cast<std::size_t>(c)].weight / mu(c);
        drop = static_cast<std::size_t>(c);
      }
    for (Eigen::Index c = 0; c < k; ++c) terms[static_cast<std::size_t>(c)].weight -= tau * mu(c);
    terms.erase(terms.begin() + static_cast<std::ptrdiff_t>(drop));
    std::erase_if(terms, [](const auto& t) { return t.weight <= 1e-15; });
  }
  bk.terms = std::move(terms);
  return bk;
}

}  // namespace

DiagonalPOVM js_povm(std::span<const double> current, std::span<const double> target,
                     const majorize::DoublyStochastic& D) {
  const std::size_t d = current.size();
  if (target.size() != d || D.dim() != d) throw DomainError("js_povm: dimension mismatch");
  const Eigen::Map<const Eigen::VectorXd> t(target.data(), static_cast<Eigen::Index>(d));
  const Eigen::VectorXd mixed = D.matrix() * t;
  for (std::size_t i = 0; i < d; ++i)
    if (std::abs(mixed(static_cast<Eigen::Index>(i)) - current[i]) > 1e-10)
      throw DomainError("js_povm: current != D * target");

  const auto bk = reduce_terms(majorize::birkhoff_decompose(D), target);
  DiagonalPOVM povm;
  povm.support.resize(d);
  for (std::size_t j = 0; j < d; ++j) povm.support[j] = current[j] > kSupport;
  for (std::size_t m = 0; m < bk.terms.size(); ++m) {
    const auto& term = bk.terms[m];
    std::vector<double> a(d, 0.0);
    for (std::size_t j = 0; j < d; ++j) {
      if (povm.support[j])
        a[j] = std::min(1.0, term.weight * target[term.perm[j]] / current[j]);
      else
        a[j] = m == 0 ? 1.0 : 0.0;
    }
    povm.elements.push_back(std::move(a));
    povm.corrections.push_back(term.perm);
    povm.weights.push_back(term.weight);
  }
  povm.validate();
  return povm;
}

// --- dilation and synthesis ---------------------------------------------------

Eigen::MatrixXd EmbeddingUnitary::assembled() const {
  const auto a = static_cast<Eigen::Index>(aux_dim());
  const auto n = static_cast<Eigen::Index>(data_dim) * a;
  Eigen::MatrixXd u = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t j = 0; j < data_dim; ++j)
    u.block(static_cast<Eigen::Index>(j) * a, static_cast<Eigen::Index>(j) * a, a, a) = blocks[j];
  return u;
}

EmbeddingUnitary embed_povm(const DiagonalPOVM& povm) {
  povm.validate();
  EmbeddingUnitary u;
  u.data_dim = povm.dim();
  u.outcome_count = povm.outcome_count();
  u.aux_count = povm.trivial() ? 0 : qubits_for(povm.outcome_count());
  const auto a = static_cast<Eigen::Index>(u.aux_dim());
  for (std::size_t j = 0; j < u.data_dim; ++j) {
    if (povm.trivial() || !povm.support[j]) {
      u.blocks.push_back(Eigen::MatrixXd::Identity(a, a));
      u.identity.push_back(true);
      continue;
    }
    Eigen::VectorXd v = Eigen::VectorXd::Zero(a);
    for (std::size_t m = 0; m < povm.outcome_count(); ++m)
      v(static_cast<Eigen::Index>(m)) = std::sqrt(std::max(0.0, povm.elements[m][j]));
    v.normalize();
    Eigen::MatrixXd h = reflection_to(v);
    const bool id = (h - Eigen::MatrixXd::Identity(a, a)).cwiseAbs().maxCoeff() < 1e-12;
    u.blocks.push_back(std::move(h));
    u.identity.push_back(id);
  }
  return u;
}

std::size_t SynthesisReport::mcx_count() const {
  std::size_t n = 0;
  for (const auto& b : blocks) n += b.mcx.size();
  return n;
}

Eigen::MatrixXd SynthesisReport::product(std::size_t data_dim, std::size_t aux_count) const {
  const auto a = static_cast<Eigen::Index>(std::size_t{1} << aux_count);
  const auto n = static_cast<Eigen::Index>(data_dim) * a;
  Eigen::MatrixXd p = Eigen::MatrixXd::Identity(n, n);
  for (const auto& b : blocks) {
    Eigen::MatrixXd block = Eigen::MatrixXd::Identity(n, n);
    const auto off = static_cast<Eigen::Index>(b.data_index) * a;
    block.block(off, off, a, a) = b.unitary;
    p = block * p;
  }
  return p;
}

SynthesisReport synthesize(const EmbeddingUnitary& u, std::span<const std::string> data_qubits,
                           std::span<const std::string> aux_qubits, bool allow_multi_element) {
  if ((std::size_t{1} << data_qubits.size()) != u.data_dim)
    throw DomainError("synthesize: data register does not match the unitary");
  if (aux_qubits.size() < u.aux_count) throw DomainError("synthesize: not enough auxiliary qubits");
  const bool multi = u.outcome_count > 2;
  if (multi && !allow_multi_element)
    throw DomainError("synthesize: rounds with more than two outcomes are not enabled");

  SynthesisReport report;
  report.exact = !multi;
  std::vector<std::string> touched(data_qubits.begin(), data_qubits.end());
  touched.insert(touched.end(), aux_qubits.begin(),
                 aux_qubits.begin() + static_cast<std::ptrdiff_t>(u.aux_count));
  const std::size_t per_block = multi ? 2 * (u.outcome_count - 1) : 2;
  for (std::size_t j = 0; j < u.data_dim; ++j) {
    if (u.identity[j]) continue;
    SynthesisBlock b;
    b.data_index = j;
    b.unitary = u.blocks[j];
    b.mcx.assign(per_block, McxGate{touched});
    report.blocks.push_back(std::move(b));
  }
  return report;
}

// --- schedule -------------------------------------------------------------------

std::size_t ProtocolSchedule::total_mcx() const {
  std::size_t n = 0;
  for (const auto& r : rounds) n += r.synthesis.mcx_count();
  if (!filter.trivial) n += filter.dilation.synthesis.mcx_count();
  return n;
}

std::size_t ProtocolSchedule::max_aux_count() const {
  std::size_t n = 0;
  for (const auto& r : rounds) n = std::max(n, r.unitary.aux_count);
  if (!filter.trivial) n = std::max(n, filter.dilation.unitary.aux_count);
  return n;
}

ProtocolSchedule compile_schedule(const qmath::SchmidtDecomposition& surrogate,
                                  const qmath::SchmidtDecomposition& target,
                                  std::size_t ttransforms_per_round) {
  if (ttransforms_per_round == 0) throw DomainError("compile_schedule: group size must be >= 1");
  if (surrogate.left != target.left || surrogate.right != target.right)
    throw DomainError("compile_schedule: surrogate and target use different registers");
  const std::size_t d = surrogate.left.dim();
  if (surrogate.right.dim() != d) throw DomainError("compile_schedule: parties differ in dimension");

  const SchmidtVector alpha = surrogate.coefficients.padded(d);
  const SchmidtVector beta = target.coefficients.padded(d);
  if (alpha.rank() < beta.rank())
    throw DomainError("compile_schedule: Schmidt rank of the surrogate is below the target's");

  ProtocolSchedule s;
  s.layout = concat(surrogate.left, surrogate.right);
  s.alice_data = surrogate.left.all_labels();
  s.bob_data = surrogate.right.all_labels();
  s.initial = alpha;
  s.target = beta;
  s.success_probability = majorize::vidal_probability(alpha, beta);
  s.intermediate = majorize::vidal_intermediate(alpha, beta);
  s.alice_to_frame = surrogate.left_basis.adjoint();
  s.bob_to_frame = surrogate.right_basis.adjoint();
  s.alice_from_frame = target.left_basis;
  s.bob_from_frame = target.right_basis;

  const auto& gamma = s.intermediate.values();
  const auto ts = majorize::t_transform_decompose(alpha, s.intermediate);
  s.ttransform_count = ts.size();
  const std::size_t g =
      ttransforms_per_round == kAllTransforms ? std::max<std::size_t>(ts.size(), 1) : ttransforms_per_round;
  s.ttransforms_per_round = g;

  // chain[i] = T_i ... T_1 gamma; round r spans chain[r g] -> chain[(r+1) g].
  std::vector<std::vector<double>> chain{gamma};
  for (const auto& t : ts) {
    auto next = chain.back();
    t.apply(next);
    chain.push_back(std::move(next));
  }
  const auto groups = majorize::group_ttransforms(ts, d, g);
  for (std::size_t r = groups.size(); r-- > 0;) {
    const auto& cur = chain[std::min((r + 1) * g, ts.size())];
    const auto& tgt = chain[r * g];
    auto povm = js_povm(cur, tgt, groups[r]);
    s.rounds.push_back(make_round(std::move(povm), s.alice_data, g > 1, cur, tgt));
  }

  // Filter on the intermediate vector.
  const double p = s.success_probability;
  s.filter.diagonal.assign(d, 1.0);
  for (std::size_t i = 0; i < d; ++i) {
    if (gamma[i] <= kSupport) continue;
    double f2 = p * beta[i] / gamma[i];
    if (f2 > 1.0 + 1e-10) throw NumericalError("compile_schedule: filter exceeds unity");
    f2 = std::min(f2, 1.0);
    s.filter.diagonal[i] = std::sqrt(f2);
  }
  s.filter.trivial = std::all_of(s.filter.diagonal.begin(), s.filter.diagonal.end(),
                                 [](double f) { return std::abs(f - 1.0) <= 1e-12; });
  if (!s.filter.trivial) {
    DiagonalPOVM povm;
    povm.support.resize(d);
    std::vector<double> pass(d), fail(d);
    for (std::size_t i = 0; i < d; ++i) {
      povm.support[i] = gamma[i] > kSupport;
      pass[i] = s.filter.diagonal[i] * s.filter.diagonal[i];
      fail[i] = 1.0 - pass[i];
    }
    povm.elements = {std::move(pass), std::move(fail)};
    povm.corrections = {identity_perm(d), identity_perm(d)};
    povm.weights = {p, 1.0 - p};
    s.filter.dilation = make_round(std::move(povm), s.alice_data, false, gamma, beta.values());
  }
  return s;
}

ProtocolSchedule compile_schedule(const qmath::PureState& surrogate, const qmath::PureState& target,
                                  std::size_t ttransforms_per_round) {
  const auto sd = qmath::schmidt_decompose(surrogate);
  const auto td = qmath::schmidt_decompose(qmath::reorder(target, concat(sd.left, sd.right)));
  return compile_schedule(sd, td, ttransforms_per_round);
}

// --- execution ----------------------------------------------------------------------

std::vector<Branch> execute_round(const DensityMatrix& state, const Round& round, double p_g) {
  if (!(p_g >= 0.0 && p_g <= 1.0)) throw DomainError("execute_round: p_g must lie in [0, 1]");
  const Layout& layout = state.layout();
  const std::size_t n = layout.size();
  const auto data = layout.labels(Party::alice);
  const auto data_pos = layout.indices_of(data);
  const EmbeddingUnitary& u = round.unitary;
  if ((std::size_t{1} << data.size()) != u.data_dim)
    throw DomainError("execute_round: Alice's data register does not match the round");

  const Permutation id = identity_perm(u.data_dim);
  if (round.povm.trivial()) return {Branch{0, 1.0, state, round.povm.corrections.front()}};

  const std::size_t gates = round.synthesis.mcx_count();
  const noise::DepolarizingWeights equal;
  ComplexMatrix rho = state.matrix();
  for (std::size_t q : data_pos)
    for (std::size_t t = 0; t < gates; ++t) rho = noise::depolarize(rho, p_g, equal, q, n);

  const std::size_t outcomes = u.aux_dim();
  const std::size_t m_count = round.povm.outcome_count();
  std::vector<Branch> branches;
  double total = 0.0;
  auto emit = [&](std::size_t m, ComplexMatrix&& mat) {
    const double w = mat.trace().real();
    total += w;
    if (w <= kBranchFloor) return;
    branches.push_back(Branch{m, w, normalized_branch(layout, std::move(mat), w),
                              m < m_count ? round.povm.corrections[m] : id});
  };

  const auto aux = layout.aux_labels(Party::alice);
  if (!aux.empty()) {
    if (aux.size() < u.aux_count) throw DomainError("execute_round: not enough auxiliary qubits");
    const std::vector<std::string> used(aux.begin(), aux.begin() + static_cast<std::ptrdiff_t>(u.aux_count));
    const auto aux_pos = layout.indices_of(used);
    const auto red = qmath::partial_trace(state, used);
    if (red.matrix()(0, 0).real() < 1.0 - qmath::kStructuralTol)
      throw DomainError("execute_round: auxiliary register is not in |0>");
    for (std::size_t q : aux_pos)
      for (std::size_t t = 0; t < gates; ++t) rho = noise::depolarize(rho, p_g, equal, q, n);
    std::vector<std::size_t> all_pos = data_pos;
    all_pos.insert(all_pos.end(), aux_pos.begin(), aux_pos.end());
    rho = qmath::conjugate(rho, u.assembled().cast<Complex>(), all_pos, n);
    for (std::size_t m = 0; m < outcomes; ++m) {
      ComplexMatrix reset = ComplexMatrix::Zero(static_cast<Eigen::Index>(outcomes),
                                                static_cast<Eigen::Index>(outcomes));
      reset(0, static_cast<Eigen::Index>(m)) = 1.0;
      emit(m, qmath::conjugate(rho, reset, aux_pos, n));
    }
  } else {
    // Fresh auxiliaries: their gate noise only matters through the bit-flip
    // population, so the register enters as a diagonal mixture sigma.
    const double f = noise::flipped_population(p_g, gates);
    std::vector<double> sigma(outcomes, 1.0);
    for (std::size_t a = 0; a < outcomes; ++a)
      for (std::size_t b = 0; b < u.aux_count; ++b)
        sigma[a] *= ((a >> (u.aux_count - 1 - b)) & 1U) ? f : 1.0 - f;

    const auto jx = sub_index(data_pos, n);
    const auto dd = static_cast<Eigen::Index>(u.data_dim);
    const auto dim = static_cast<Eigen::Index>(layout.dim());
    for (std::size_t m = 0; m < outcomes; ++m) {
      // coeff(j, k) = sum_a sigma_a <m|U^j|a> <m|U^k|a>
      Eigen::MatrixXd coeff = Eigen::MatrixXd::Zero(dd, dd);
      for (std::size_t a = 0; a < outcomes; ++a) {
        if (sigma[a] == 0.0) continue;
        Eigen::VectorXd k(dd);
        for (Eigen::Index j = 0; j < dd; ++j)
          k(j) = u.blocks[static_cast<std::size_t>(j)](static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(a));
        coeff += sigma[a] * k * k.transpose();
      }
      ComplexMatrix out(dim, dim);
      for (Eigen::Index y = 0; y < dim; ++y)
        for (Eigen::Index x = 0; x < dim; ++x)
          out(x, y) = coeff(static_cast<Eigen::Index>(jx[static_cast<std::size_t>(x)]),
                            static_cast<Eigen::Index>(jx[static_cast<std::size_t>(y)])) * rho(x, y);
      emit(m, std::move(out));
    }
  }
  if (std::abs(total - 1.0) > 1e-10) throw NumericalError("execute_round: branch weights do not sum to 1");
  return branches;
}

FilterResult execute_filter(const DensityMatrix& state, const FilterStage& filter) {
  if (filter.trivial) return {1.0, state};
  const Layout& layout = state.layout();
  const auto data_pos = layout.indices_of(layout.labels(Party::alice));
  if ((std::size_t{1} << data_pos.size()) != filter.diagonal.size())
    throw DomainError("execute_filter: register does not match the filter");
  for (double f : filter.diagonal)
    if (f < 0.0 || f > 1.0 + 1e-10) throw DomainError("execute_filter: filter entry out of [0, 1]");
  const auto jx = sub_index(data_pos, layout.size());
  const auto dim = static_cast<Eigen::Index>(layout.dim());
  ComplexMatrix out(dim, dim);
  for (Eigen::Index y = 0; y < dim; ++y)
    for (Eigen::Index x = 0; x < dim; ++x)
      out(x, y) = filter.diagonal[jx[static_cast<std::size_t>(x)]] *
                  filter.diagonal[jx[static_cast<std::size_t>(y)]] * state.matrix()(x, y);
  const double w = out.trace().real();
  if (w <= 0.0) throw NumericalError("execute_filter: success branch has zero weight");
  return {w, normalized_branch(layout, std::move(out), w)};
}

DensityMatrix apply_correction(const DensityMatrix& state, const Permutation& perm,
                               std::span<const std::string> alice_data,
                               std::span<const std::string> bob_data) {
  if (is_identity(perm)) return state;
  // |i> -> |perm[i]>, i.e. the transpose of permutation_matrix(perm).
  const ComplexMatrix c = qmath::permutation_matrix(perm).transpose().cast<Complex>();
  DensityMatrix out = qmath::apply_operator(state, c, alice_data);
  return qmath::apply_operator(out, c, bob_data);
}

ScheduleRun execute_schedule(const ProtocolSchedule& schedule, const DensityMatrix& physical, double p_g) {
  DensityMatrix rho = qmath::reorder(physical, schedule.layout);
  rho = qmath::apply_operator(rho, schedule.alice_to_frame, schedule.alice_data);
  rho = qmath::apply_operator(rho, schedule.bob_to_frame, schedule.bob_data);

  ScheduleRun run;
  for (const auto& round : schedule.rounds) {
    const auto branches = execute_round(rho, round, p_g);
    const auto dim = static_cast<Eigen::Index>(rho.dim());
    ComplexMatrix merged = ComplexMatrix::Zero(dim, dim);
    double sum = 0.0;
    for (const auto& b : branches) {
      merged += b.weight *
                apply_correction(b.state, b.correction, schedule.alice_data, schedule.bob_data).matrix();
      sum += b.weight;
    }
    run.round_weight_sums.push_back(sum);
    run.branch_count *= round.povm.outcome_count();
    rho = DensityMatrix(rho.layout(), std::move(merged / sum));
  }

  run.success_probability = 1.0;
  if (!schedule.filter.trivial) {
    const auto branches = execute_round(rho, schedule.filter.dilation, p_g);
    run.branch_count *= 2;
    double sum = 0.0;
    const Branch* success = nullptr;
    for (const auto& b : branches) {
      sum += b.weight;
      if (b.outcome == 0) success = &b;
    }
    run.round_weight_sums.push_back(sum);
    if (success == nullptr) throw NumericalError("execute_schedule: filter never succeeds");
    run.success_probability = success->weight;
    rho = success->state;
  }

  rho = qmath::apply_operator(rho, schedule.alice_from_frame, schedule.alice_data);
  rho = qmath::apply_operator(rho, schedule.bob_from_frame, schedule.bob_data);
  run.output = std::move(rho);
  return run;
}

}  // namespace ecsim::locc
