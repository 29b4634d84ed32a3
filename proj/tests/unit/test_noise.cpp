#include <doctest.h>

#include "../support/oracles.hpp"
#include "ecsim/errors.hpp"
#include "ecsim/noise.hpp"

using namespace ecsim;
using namespace ecsim::noise;
using qmath::DensityMatrix;

TEST_SUITE("noise") {
  TEST_CASE("coherent state components") {
    const auto b = BellBasis::on();
    const auto psi = coherent_state(0.3);
    CHECK(qmath::fidelity(psi, b.phi_plus) == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(qmath::fidelity(psi, b.phi_minus) == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(qmath::fidelity(psi, b.psi_plus) == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(qmath::fidelity(psi, b.psi_minus) == doctest::Approx(0.1).epsilon(1e-12));

    CoherentWeights z_only{0.0, 1.0, 0.0};
    const auto pz = coherent_state(0.2, z_only);
    CHECK(qmath::fidelity(pz, b.phi_minus) == doctest::Approx(0.2).epsilon(1e-12));
    CHECK_THROWS_AS(coherent_state(1.5), DomainError);
    CHECK_THROWS_AS(coherent_state(0.1, CoherentWeights{1.0, 1.0, 0.0}), DomainError);
  }

  TEST_CASE("depolarized Phi+ is the Werner state") {
    NoiseParams p;
    p.p_d = 0.2;
    const DensityMatrix rho = prepare_state(p);
    CHECK((rho.matrix() - oracle::werner(0.8)).norm() < 1e-12);
  }

  TEST_CASE("depolarize matches the Kraus oracle") {
    NoiseParams p;
    p.a = 0.1;
    const DensityMatrix pure = DensityMatrix::from_pure(coherent_state(0.1));
    const DepolarizingWeights w{0.5, 0.3, 0.2};
    const double q = 0.13;
    const DensityMatrix got = depolarize(pure, q, w, "B");
    const oracle::Mat& r = pure.matrix();
    const auto on_b = [](const oracle::Mat& m) { return oracle::kron(oracle::I2(), m); };
    const oracle::Mat ref = (1 - q) * r + q * w.x * on_b(oracle::X()) * r * on_b(oracle::X()) +
                            q * w.z * on_b(oracle::Z()) * r * on_b(oracle::Z()) +
                            q * w.y * on_b(oracle::Y()) * r * on_b(oracle::Y());
    CHECK((got.matrix() - ref).norm() < 1e-12);
    CHECK_THROWS_AS(depolarize(pure, 1.2, w, "B"), DomainError);
    CHECK_THROWS_AS(depolarize(pure, 0.1, DepolarizingWeights{0.5, 0.5, 0.5}, "B"), DomainError);
  }

  TEST_CASE("flipped population closed form") {
    for (double p : {0.0, 0.01, 0.3}) {
      for (std::size_t n : {0u, 1u, 5u, 40u}) {
        const double ref = 0.5 * (1.0 - std::pow(1.0 - 4.0 * p / 3.0, static_cast<double>(n)));
        CHECK(flipped_population(p, n) == doctest::Approx(ref).epsilon(1e-12));
      }
    }
  }

  TEST_CASE("prepared state and surrogate") {
    NoiseParams p;
    p.a = 0.15;
    p.p_d = 0.05;
    const DensityMatrix rho = prepare_state(p);
    CHECK(std::abs(rho.matrix().trace().real() - 1.0) < 1e-12);
    const auto top = surrogate(rho);
    CHECK(!top.degenerate);
    CHECK(top.eigenvalue > 0.9);
    CHECK(qmath::fidelity(top.state, coherent_state(0.15)) > 0.99);

    NoiseParams bad;
    bad.p_g = -0.1;
    CHECK_THROWS_AS(bad.validate(), DomainError);
  }
}
