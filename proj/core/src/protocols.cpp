#include "ecsim/protocols.hpp"

#include <algorithm>
#include <cmath>

#include "ecsim/errors.hpp"
#include "ecsim/majorize.hpp"
#include "ecsim/noise.hpp"

namespace ecsim::protocols {

using qmath::DensityMatrix;
using qmath::Layout;
using qmath::Party;
using qmath::PureState;
using qmath::Role;
using qmath::SchmidtDecomposition;

namespace {

// Reorders a two-qubit state to (alice, bob) and renames it.
DensityMatrix as_pair(const DensityMatrix& rho, const std::string& alice, const std::string& bob,
                      Role role = Role::data) {
  const Layout& l = rho.layout();
  const auto a = l.labels(Party::alice, true);
  const auto b = l.labels(Party::bob, true);
  if (l.size() != 2 || a.size() != 1 || b.size() != 1)
    throw DomainError("pair state must hold one Alice and one Bob qubit");
  const DensityMatrix ordered = qmath::reorder(rho, Layout({l[l.index_of(a[0])], l[l.index_of(b[0])]}));
  return ordered.relabeled(qmath::pair_layout(alice, bob, role));
}

PureState as_pair(const PureState& psi, const std::string& alice, const std::string& bob,
                  Role role = Role::data) {
  const Layout& l = psi.layout();
  const auto a = l.labels(Party::alice, true);
  const auto b = l.labels(Party::bob, true);
  if (l.size() != 2 || a.size() != 1 || b.size() != 1)
    throw DomainError("pair state must hold one Alice and one Bob qubit");
  const PureState ordered = qmath::reorder(psi, Layout({l[l.index_of(a[0])], l[l.index_of(b[0])]}));
  return ordered.relabeled(qmath::pair_layout(alice, bob, role));
}

PureState zero_pair(const std::string& alice, const std::string& bob) {
  return PureState::basis(qmath::pair_layout(alice, bob), 0);
}

// Joint state of several pairs ordered Alice qubits first.
DensityMatrix joint(const std::vector<DensityMatrix>& pairs) {
  DensityMatrix t = pairs.front();
  for (std::size_t i = 1; i < pairs.size(); ++i) t = qmath::tensor(t, pairs[i]);
  std::vector<qmath::Qubit> order;
  for (const auto& p : pairs) order.push_back(p.layout()[0]);
  for (const auto& p : pairs) order.push_back(p.layout()[1]);
  return qmath::reorder(t, Layout(std::move(order)));
}

SchmidtDecomposition product_of(const std::vector<PureState>& pairs) {
  SchmidtDecomposition sd = qmath::schmidt_decompose(pairs.front());
  for (std::size_t i = 1; i < pairs.size(); ++i)
    sd = qmath::schmidt_product(sd, qmath::schmidt_decompose(pairs[i]));
  return sd;
}

struct Surrogates {
  PureState first;
  PureState second;
  bool degenerate = false;
};

Surrogates pair_surrogates(const DensityMatrix& p1, const DensityMatrix& p2) {
  const auto s1 = noise::surrogate(p1);
  const auto s2 = noise::surrogate(p2);
  return {s1.state, s2.state, s1.degenerate || s2.degenerate};
}

PureState output_bell() { return noise::bell_state(noise::Bell::phi_plus, qmath::pair_layout("A1", "B1")); }

locc::ProtocolSchedule plain_schedule(const Surrogates& s, std::size_t g) {
  const auto sd = product_of({s.first, s.second});
  const auto td = product_of({output_bell(), zero_pair("A2", "B2")});
  return locc::compile_schedule(sd, td, g);
}

locc::ProtocolSchedule catalytic_schedule(const Surrogates& s, const CatalystSpec& catalyst, std::size_t g) {
  const PureState cat = as_pair(catalyst.state, "Ac", "Bc", Role::catalyst);
  const auto sd = product_of({s.first, s.second, cat});
  const auto td = product_of({output_bell(), zero_pair("A2", "B2"), cat});
  return locc::compile_schedule(sd, td, g);
}

void fill_common(ProtocolResult& r, const locc::ProtocolSchedule& schedule, const locc::ScheduleRun& run) {
  r.success_probability = std::clamp(run.success_probability, 0.0, 1.0);
  r.output_state = qmath::partial_trace(run.output, std::vector<std::string>{"A1", "B1"});
  r.output_fidelity = qmath::fidelity(r.output_state, output_bell());
  r.gate_counts.alice = schedule.total_mcx();
  r.gate_counts.bob = 0;
  r.round_count = schedule.rounds.size() + (schedule.filter.trivial ? 0 : 1);
  r.branch_count = run.branch_count;
  r.conversion_probability = schedule.success_probability;
  for (double w : run.round_weight_sums)
    if (std::abs(w - 1.0) > 1e-9) throw NumericalError("protocol run: branch weights do not sum to 1");
}

ProtocolResult run_catalytic(const DensityMatrix& rho1, const DensityMatrix& rho2,
                             const CatalystSpec& compiled, const DensityMatrix& physical,
                             const CatalystSpec& reference, std::size_t g, double p_g,
                             std::string name) {
  const DensityMatrix p1 = as_pair(rho1, "A1", "B1");
  const DensityMatrix p2 = as_pair(rho2, "A2", "B2");
  const DensityMatrix pc = as_pair(physical, "Ac", "Bc", Role::catalyst);
  const PureState ref = as_pair(reference.state, "Ac", "Bc", Role::catalyst);
  const Surrogates s = pair_surrogates(p1, p2);
  const auto schedule = catalytic_schedule(s, compiled, g);
  const auto run = locc::execute_schedule(schedule, joint({p1, p2, pc}), p_g);

  ProtocolResult r;
  r.protocol = std::move(name);
  fill_common(r, schedule, run);
  r.degenerate_surrogate = s.degenerate;
  r.catalyst = reference;
  r.catalyst_input = pc;
  r.catalyst_post = qmath::partial_trace(run.output, std::vector<std::string>{"Ac", "Bc"});
  r.catalyst_fidelity_before = qmath::fidelity(pc, ref);
  r.catalyst_fidelity_after = qmath::fidelity(*r.catalyst_post, ref);
  return r;
}

CatalystSpec spec_from_state(const PureState& psi) {
  const PureState pair = as_pair(psi, "Ac", "Bc", Role::catalyst);
  return CatalystSpec{qmath::schmidt_decompose(pair).coefficients, pair};
}

double conversion(const SchmidtVector& s, const SchmidtVector& t, double c1) {
  const SchmidtVector c({c1, 1.0 - c1});
  return majorize::vidal_probability(sorted_tensor(s, c), sorted_tensor(t, c));
}

}  // namespace

CatalystSpec CatalystSpec::from_c1(double c1) {
  if (!(c1 >= 0.5 && c1 <= 1.0)) throw DomainError("catalyst: c1 must lie in [0.5, 1]");
  qmath::ComplexVector v = qmath::ComplexVector::Zero(4);
  v(0) = std::sqrt(c1);
  v(3) = std::sqrt(1.0 - c1);
  return CatalystSpec{SchmidtVector({c1, 1.0 - c1}),
                      PureState(qmath::pair_layout("Ac", "Bc", Role::catalyst), v)};
}

locc::ProtocolSchedule nec_schedule(const DensityMatrix& rho1, const DensityMatrix& rho2, std::size_t g) {
  return plain_schedule(pair_surrogates(as_pair(rho1, "A1", "B1"), as_pair(rho2, "A2", "B2")), g);
}

locc::ProtocolSchedule cec_schedule(const DensityMatrix& rho1, const DensityMatrix& rho2,
                                    const CatalystSpec& catalyst, std::size_t g) {
  return catalytic_schedule(pair_surrogates(as_pair(rho1, "A1", "B1"), as_pair(rho2, "A2", "B2")), catalyst, g);
}

ProtocolResult run_nec(const DensityMatrix& rho1, const DensityMatrix& rho2, std::size_t g, double p_g) {
  const DensityMatrix p1 = as_pair(rho1, "A1", "B1");
  const DensityMatrix p2 = as_pair(rho2, "A2", "B2");
  const Surrogates s = pair_surrogates(p1, p2);
  const auto schedule = plain_schedule(s, g);
  const auto run = locc::execute_schedule(schedule, joint({p1, p2}), p_g);

  ProtocolResult r;
  r.protocol = "nec";
  fill_common(r, schedule, run);
  r.degenerate_surrogate = s.degenerate;
  return r;
}

CatalystSpec find_catalyst(const SchmidtVector& surrogate, const SchmidtVector& target) {
  constexpr double kStep = 1e-4;
  constexpr double kTie = 1e-12;
  double best_c1 = 1.0;
  double best = conversion(surrogate, target, 1.0);
  const int steps = static_cast<int>(std::lround(0.5 / kStep));
  for (int i = steps - 1; i >= 0; --i) {
    const double c1 = 0.5 + i * kStep;
    const double p = conversion(surrogate, target, c1);
    if (p > best + kTie) {
      best = p;
      best_c1 = c1;
    }
  }
  // Golden-section refinement around the grid optimum.
  double lo = std::max(0.5, best_c1 - kStep);
  double hi = std::min(1.0, best_c1 + kStep);
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - phi * (hi - lo);
  double x2 = lo + phi * (hi - lo);
  double f1 = conversion(surrogate, target, x1);
  double f2 = conversion(surrogate, target, x2);
  for (int it = 0; it < 60; ++it) {
    if (f1 > f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - phi * (hi - lo);
      f1 = conversion(surrogate, target, x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + phi * (hi - lo);
      f2 = conversion(surrogate, target, x2);
    }
  }
  const double refined = (lo + hi) / 2.0;
  if (conversion(surrogate, target, refined) > best + kTie) best_c1 = refined;
  return CatalystSpec::from_c1(best_c1);
}

CatalystSpec find_catalyst(const PureState& surrogate, const PureState& target) {
  const auto s = qmath::schmidt_decompose(surrogate).coefficients;
  const auto t = qmath::schmidt_decompose(target).coefficients;
  return find_catalyst(s, t);
}

CatalystSpec best_catalyst(const DensityMatrix& rho1, const DensityMatrix& rho2) {
  const Surrogates s = pair_surrogates(as_pair(rho1, "A1", "B1"), as_pair(rho2, "A2", "B2"));
  const SchmidtVector sv = product_of({s.first, s.second}).coefficients;
  return find_catalyst(sv, SchmidtVector({0.5, 0.5, 0.0, 0.0}));
}

ProtocolResult run_cec(const DensityMatrix& rho1, const DensityMatrix& rho2, const CatalystSpec& catalyst,
                       std::size_t g, double p_g) {
  return run_catalytic(rho1, rho2, catalyst, DensityMatrix::from_pure(catalyst.state), catalyst, g, p_g, "cec");
}

ProtocolResult run_cec(const DensityMatrix& rho1, const DensityMatrix& rho2, const DensityMatrix& catalyst,
                       std::size_t g, double p_g) {
  const CatalystSpec spec = spec_from_state(noise::surrogate(catalyst).state);
  return run_catalytic(rho1, rho2, spec, catalyst, spec, g, p_g, "cec");
}

ProtocolResult reuse_catalyst(const ProtocolResult& prev, const DensityMatrix& rho1, const DensityMatrix& rho2,
                              std::size_t g, double p_g, bool recompile) {
  if (!prev.catalyst_post || !prev.catalyst)
    throw DomainError("reuse_catalyst: previous result carries no catalyst");
  const CatalystSpec compiled =
      recompile ? spec_from_state(noise::surrogate(*prev.catalyst_post).state) : *prev.catalyst;
  return run_catalytic(rho1, rho2, compiled, *prev.catalyst_post, *prev.catalyst, g, p_g, "catalyst-reuse");
}

std::string to_string(Basis basis) {
  switch (basis) {
    case Basis::x: return "x";
    case Basis::y: return "y";
    case Basis::z: return "z";
  }
  return "?";
}

nlohmann::json to_json(const ProtocolResult& r) {
  nlohmann::json j{
      {"protocol", r.protocol},
      {"success_probability", r.success_probability},
      {"output_fidelity", r.output_fidelity},
      {"infidelity", r.infidelity()},
      {"gate_counts", {{"alice", r.gate_counts.alice}, {"bob", r.gate_counts.bob}}},
      {"round_count", r.round_count},
      {"branch_count", r.branch_count},
      {"conversion_probability", r.conversion_probability},
      {"degenerate_surrogate", r.degenerate_surrogate},
  };
  if (r.catalyst) j["catalyst_schmidt"] = r.catalyst->schmidt.values();
  if (r.catalyst_fidelity_before) j["catalyst_fidelity_before"] = *r.catalyst_fidelity_before;
  if (r.catalyst_fidelity_after) j["catalyst_fidelity_after"] = *r.catalyst_fidelity_after;
  return j;
}

}  // namespace ecsim::protocols
