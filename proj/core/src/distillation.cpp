#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <map>
#include <tuple>

#include "ecsim/errors.hpp"
#include "ecsim/noise.hpp"
#include "ecsim/protocols.hpp"

namespace ecsim::protocols {

using qmath::Complex;
using qmath::ComplexMatrix;
using qmath::DensityMatrix;
using qmath::Layout;

namespace {

// Global phase removed: first entry of non-negligible modulus made real positive.
ComplexMatrix canonical(const ComplexMatrix& m) {
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    const Complex z = m(i);
    if (std::abs(z) > 1e-9) return m * (std::abs(z) / z);
  }
  return m;
}

using Key = std::vector<long long>;

Key key_of(const ComplexMatrix& m) {
  Key k;
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    k.push_back(std::llround(m(i).real() * 1e8));
    k.push_back(std::llround(m(i).imag() * 1e8));
  }
  return k;
}

ComplexMatrix cnot() {
  ComplexMatrix c = ComplexMatrix::Zero(4, 4);
  c(0, 0) = c(1, 1) = c(2, 3) = c(3, 2) = 1.0;
  return c;
}

ComplexMatrix rx_half_pi() {
  const double s = 1.0 / std::sqrt(2.0);
  ComplexMatrix r(2, 2);
  r << s, Complex(0, -s), Complex(0, -s), s;
  return r;
}

// Pauli observable whose Phi+ correlation decides acceptance.
std::pair<ComplexMatrix, double> readout(Basis b) {
  switch (b) {
    case Basis::x: return {qmath::pauli_x(), 1.0};
    case Basis::y: return {qmath::pauli_y(), -1.0};
    case Basis::z: return {qmath::pauli_z(), 1.0};
  }
  throw DomainError("unknown basis");
}

DensityMatrix pair_of(const DensityMatrix& rho, const std::string& alice, const std::string& bob) {
  const Layout& l = rho.layout();
  const auto a = l.labels(qmath::Party::alice, true);
  const auto b = l.labels(qmath::Party::bob, true);
  if (l.size() != 2 || a.size() != 1 || b.size() != 1)
    throw DomainError("pair state must hold one Alice and one Bob qubit");
  const DensityMatrix ordered = qmath::reorder(rho, Layout({l[l.index_of(a[0])], l[l.index_of(b[0])]}));
  return ordered.relabeled(qmath::pair_layout(alice, bob));
}

}  // namespace

const std::vector<ComplexMatrix>& single_qubit_cliffords() {
  static const std::vector<ComplexMatrix> group = [] {
    const std::vector<ComplexMatrix> gens{qmath::hadamard(), [] {
                                            ComplexMatrix s = ComplexMatrix::Identity(2, 2);
                                            s(1, 1) = Complex(0, 1);
                                            return s;
                                          }()};
    std::vector<ComplexMatrix> out{ComplexMatrix::Identity(2, 2)};
    std::map<Key, std::size_t> seen{{key_of(out[0]), 0}};
    std::deque<std::size_t> queue{0};
    while (!queue.empty()) {
      const ComplexMatrix cur = out[queue.front()];
      queue.pop_front();
      for (const auto& g : gens) {
        ComplexMatrix next = canonical(g * cur);
        if (seen.emplace(key_of(next), out.size()).second) {
          queue.push_back(out.size());
          out.push_back(std::move(next));
        }
      }
    }
    if (out.size() != 24) throw NumericalError("Clifford enumeration did not close at 24 elements");
    return out;
  }();
  return group;
}

DistillationPlan DistillationPlan::from_index(std::size_t index) {
  if (index >= kCount) throw DomainError("distillation plan index out of range");
  return {index / 3 / 24, index / 3 % 24, static_cast<Basis>(index % 3)};
}

DistillationPlan DistillationPlan::dejmps() {
  const auto& cs = single_qubit_cliffords();
  const Key target = key_of(canonical(rx_half_pi()));
  for (std::size_t i = 0; i < cs.size(); ++i)
    if (key_of(cs[i]) == target) return {i, i, Basis::z};
  throw NumericalError("Rx(pi/2) missing from the Clifford table");
}

ProtocolResult run_distillation(const DensityMatrix& rho1, const DensityMatrix& rho2,
                                const DistillationPlan& plan, double p_g) {
  if (!(p_g >= 0.0 && p_g <= 1.0)) throw DomainError("run_distillation: p_g must lie in [0, 1]");
  const auto& cs = single_qubit_cliffords();
  if (plan.first >= cs.size() || plan.second >= cs.size()) throw DomainError("invalid distillation plan");

  DensityMatrix rho = qmath::tensor(pair_of(rho1, "A1", "B1"), pair_of(rho2, "A2", "B2"));
  const std::size_t n = rho.layout().size();
  const auto pos = [&](const char* l) { return rho.layout().index_of(l); };

  ComplexMatrix m = rho.matrix();
  const auto local = [&](const ComplexMatrix& u, std::size_t q) {
    const std::array<std::size_t, 1> p{q};
    m = qmath::conjugate(m, u, p, n);
  };
  local(cs[plan.first], pos("A1"));
  local(cs[plan.second], pos("A2"));
  local(cs[plan.first].conjugate(), pos("B1"));
  local(cs[plan.second].conjugate(), pos("B2"));

  const noise::DepolarizingWeights equal;
  for (const auto& [c, t] : {std::pair{pos("A1"), pos("A2")}, std::pair{pos("B1"), pos("B2")}}) {
    const std::array<std::size_t, 2> p{c, t};
    m = qmath::conjugate(m, cnot(), p, n);
    m = noise::depolarize(m, p_g, equal, c, n);
    m = noise::depolarize(m, p_g, equal, t, n);
  }

  // Accepting projector (I + eta sigma (x) sigma) / 2 on the measured pair.
  const auto [sigma, eta] = readout(plan.basis);
  const ComplexMatrix accept = 0.5 * (ComplexMatrix::Identity(4, 4) + eta * qmath::tensor(sigma, sigma));
  const std::array<std::size_t, 2> measured{pos("A2"), pos("B2")};
  m = qmath::conjugate(m, accept, measured, n);
  const double w = m.trace().real();

  ProtocolResult r;
  r.protocol = "distillation";
  r.success_probability = std::clamp(w, 0.0, 1.0);
  r.gate_counts = {1, 1};
  r.round_count = 1;
  r.branch_count = 4;
  if (w <= 1e-15) {
    r.output_state = DensityMatrix::maximally_mixed(qmath::pair_layout("A1", "B1"));
    r.output_fidelity = 0.0;
    return r;
  }
  const DensityMatrix post(rho.layout(), m / w);
  r.output_state = qmath::partial_trace(post, std::vector<std::string>{"A1", "B1"});
  r.output_fidelity =
      qmath::fidelity(r.output_state, noise::bell_state(noise::Bell::phi_plus, qmath::pair_layout("A1", "B1")));
  return r;
}

DistillationPlan optimize_distillation(const DensityMatrix& rho1, const DensityMatrix& rho2, double p_g) {
  DistillationPlan best;
  double best_f = -1.0;
  for (std::size_t i = 0; i < DistillationPlan::kCount; ++i) {
    const auto plan = DistillationPlan::from_index(i);
    const double f = run_distillation(rho1, rho2, plan, p_g).output_fidelity;
    if (f > best_f + 1e-12) {
      best_f = f;
      best = plan;
    }
  }
  return best;
}

}  // namespace ecsim::protocols
