#include "ecsim/noise.hpp"

#include <array>
#include <cmath>
#include <span>

#include "ecsim/errors.hpp"

namespace ecsim::noise {

using qmath::ComplexMatrix;
using qmath::ComplexVector;
using qmath::DensityMatrix;
using qmath::Layout;
using qmath::PureState;

namespace {

void check_probability(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError(std::string(what) + " must lie in [0, 1]");
}

}  // namespace

void CoherentWeights::validate() const {
  const double total = std::norm(x) + std::norm(z) + std::norm(y);
  if (std::abs(total - 1.0) > qmath::kNormTol)
    throw DomainError("coherent weights: sum of |eps_k|^2 must be 1");
}

void DepolarizingWeights::validate() const {
  if (x < 0 || y < 0 || z < 0) throw DomainError("depolarizing weights must be nonnegative");
  if (std::abs(x + y + z - 1.0) > qmath::kNormTol)
    throw DomainError("depolarizing weights must sum to 1");
}

void NoiseParams::validate() const {
  check_probability(a, "a");
  check_probability(p_d, "p_d");
  check_probability(p_g, "p_g");
  coherent.validate();
  depolarizing.validate();
}

Layout default_pair() { return qmath::pair_layout("A", "B"); }

PureState bell_state(Bell which, const Layout& pair) {
  if (pair.size() != 2) throw DomainError("bell_state: layout must hold two qubits");
  const double s = 1.0 / std::sqrt(2.0);
  ComplexVector v = ComplexVector::Zero(4);
  switch (which) {
    case Bell::phi_plus: v << s, 0, 0, s; break;
    case Bell::phi_minus: v << s, 0, 0, -s; break;
    case Bell::psi_plus: v << 0, s, s, 0; break;
    case Bell::psi_minus: v << 0, s, -s, 0; break;
  }
  return PureState(pair, std::move(v));
}

BellBasis BellBasis::on(const Layout& pair) {
  return {bell_state(Bell::phi_plus, pair), bell_state(Bell::phi_minus, pair),
          bell_state(Bell::psi_plus, pair), bell_state(Bell::psi_minus, pair)};
}

PureState coherent_state(double a, const CoherentWeights& weights, const Layout& pair) {
  check_probability(a, "a");
  weights.validate();
  const BellBasis b = BellBasis::on(pair);
  ComplexVector v = std::sqrt(1.0 - a) * b.phi_plus.amplitudes() +
                    std::sqrt(a) * (weights.z * b.phi_minus.amplitudes() +
                                    weights.x * b.psi_plus.amplitudes() +
                                    weights.y * b.psi_minus.amplitudes());
  return PureState::normalized(pair, std::move(v));
}

ComplexMatrix depolarize(const ComplexMatrix& rho, double p, const DepolarizingWeights& weights,
                         std::size_t position, std::size_t n_qubits) {
  check_probability(p, "depolarizing probability");
  if (p == 0.0) return rho;
  const std::array<std::size_t, 1> pos{position};
  ComplexMatrix out = (1.0 - p) * rho;
  if (weights.x > 0) out += p * weights.x * qmath::conjugate(rho, qmath::pauli_x(), pos, n_qubits);
  if (weights.z > 0) out += p * weights.z * qmath::conjugate(rho, qmath::pauli_z(), pos, n_qubits);
  if (weights.y > 0) out += p * weights.y * qmath::conjugate(rho, qmath::pauli_y(), pos, n_qubits);
  return out;
}

DensityMatrix depolarize(const DensityMatrix& rho, double p, const DepolarizingWeights& weights,
                         const std::string& qubit) {
  weights.validate();
  const std::size_t pos = rho.layout().index_of(qubit);
  return DensityMatrix(rho.layout(), depolarize(rho.matrix(), p, weights, pos, rho.layout().size()));
}

double flipped_population(double p, std::size_t applications) {
  const DepolarizingWeights equal;
  const double flip = p * (equal.x + equal.y);
  double f = 0.0;
  for (std::size_t i = 0; i < applications; ++i) f = f * (1.0 - flip) + (1.0 - f) * flip;
  return f;
}

DensityMatrix prepare_state(const NoiseParams& params, const Layout& pair) {
  params.validate();
  const DensityMatrix pure = DensityMatrix::from_pure(coherent_state(params.a, params.coherent, pair));
  const auto bob = pair.labels(qmath::Party::bob);
  if (bob.size() != 1) throw DomainError("prepare_state: pair needs exactly one Bob qubit");
  return depolarize(pure, params.p_d, params.depolarizing, bob.front());
}

qmath::TopEigenstate surrogate(const DensityMatrix& rho) { return qmath::top_eigenstate(rho); }

}  // namespace ecsim::noise
