#pragma once

// State-preparation error channels and the gate-noise primitive.
//
// A prepared pair is rho(a, p_d) = Delta_{p_d}(|Phi_a><Phi_a|): a coherent
// admixture of the three error Bell states followed by a Pauli channel on
// Bob's (travelling) qubit.

#include <cstddef>
#include <string>

#include "ecsim/qmath.hpp"

namespace ecsim::noise {

/// Relative amplitudes (eps_x, eps_z, eps_y) of the coherent error terms.
struct CoherentWeights {
  qmath::Complex x{1.0 / 1.7320508075688772, 0.0};
  qmath::Complex z{1.0 / 1.7320508075688772, 0.0};
  qmath::Complex y{1.0 / 1.7320508075688772, 0.0};

  void validate() const;
};

/// Relative probabilities of X, Z, Y in the depolarizing channel.
struct DepolarizingWeights {
  double x = 1.0 / 3.0;
  double z = 1.0 / 3.0;
  double y = 1.0 / 3.0;

  void validate() const;
};

struct NoiseParams {
  double a = 0.0;    // coherent error probability
  CoherentWeights coherent;
  double p_d = 0.0;  // depolarizing probability of the prepared pair
  DepolarizingWeights depolarizing;
  double p_g = 0.0;  // per-gate depolarizing probability

  void validate() const;
};

enum class Bell { phi_plus, phi_minus, psi_plus, psi_minus };

/// Default pair layout {"A", "B"}.
qmath::Layout default_pair();

qmath::PureState bell_state(Bell which, const qmath::Layout& pair = default_pair());

struct BellBasis {
  qmath::PureState phi_plus;
  qmath::PureState phi_minus;
  qmath::PureState psi_plus;
  qmath::PureState psi_minus;

  static BellBasis on(const qmath::Layout& pair = default_pair());
};

/// sqrt(1-a)|Phi+> + sqrt(a)(eps_z|Phi-> + eps_x|Psi+> + eps_y|Psi->).
qmath::PureState coherent_state(double a, const CoherentWeights& weights = {},
                                const qmath::Layout& pair = default_pair());

/// Kraus channel {sqrt(1-p) I, sqrt(p e_x) X, sqrt(p e_z) Z, sqrt(p e_y) Y}.
qmath::DensityMatrix depolarize(const qmath::DensityMatrix& rho, double p,
                                const DepolarizingWeights& weights, const std::string& qubit);
qmath::ComplexMatrix depolarize(const qmath::ComplexMatrix& rho, double p,
                                const DepolarizingWeights& weights, std::size_t position,
                                std::size_t n_qubits);

/// Population of |1> after `applications` equal-weight depolarizations of |0>.
double flipped_population(double p, std::size_t applications);

qmath::DensityMatrix prepare_state(const NoiseParams& params, const qmath::Layout& pair = default_pair());

/// Maximum-weight eigenstate of rho; `degenerate` flags a tie at the top.
qmath::TopEigenstate surrogate(const qmath::DensityMatrix& rho);

}  // namespace ecsim::noise
