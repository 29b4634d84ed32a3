#include <doctest.h>

#include <random>

#include "../support/oracles.hpp"
#include "ecsim/errors.hpp"
#include "ecsim/qmath.hpp"

using namespace ecsim;
using namespace ecsim::qmath;

namespace {

Layout four_qubits() {
  return Layout({{"A1", Party::alice}, {"A2", Party::alice}, {"B1", Party::bob}, {"B2", Party::bob}});
}

ComplexVector random_vector(std::mt19937_64& rng, Eigen::Index d) {
  std::normal_distribution<double> n;
  ComplexVector v(d);
  for (auto& x : v) x = {n(rng), n(rng)};
  return v.normalized();
}

ComplexMatrix random_density(std::mt19937_64& rng, Eigen::Index d) {
  ComplexMatrix g(d, d);
  std::normal_distribution<double> n;
  for (Eigen::Index i = 0; i < g.size(); ++i) g(i) = {n(rng), n(rng)};
  ComplexMatrix r = g * g.adjoint();
  return r / r.trace();
}

}  // namespace

TEST_SUITE("qmath") {
  TEST_CASE("layout lookups and party filters") {
    Layout l({{"A1", Party::alice}, {"B1", Party::bob}, {"Ax", Party::alice, Role::auxiliary}});
    CHECK(l.dim() == 8);
    CHECK(l.index_of("B1") == 1);
    CHECK(l.labels(Party::alice) == std::vector<std::string>{"A1"});
    CHECK(l.labels(Party::alice, true) == std::vector<std::string>{"A1", "Ax"});
    CHECK(l.aux_labels(Party::alice) == std::vector<std::string>{"Ax"});
    CHECK_THROWS_AS(l.index_of("nope"), DomainError);
    CHECK_THROWS_AS(Layout({{"A", Party::alice}, {"A", Party::bob}}), DomainError);
  }

  TEST_CASE("state validation") {
    CHECK_THROWS_AS(PureState(pair_layout("A", "B"), ComplexVector::Ones(4)), DomainError);
    CHECK_THROWS_AS(PureState(pair_layout("A", "B"), ComplexVector::Ones(3).normalized()), DomainError);
    ComplexMatrix bad = ComplexMatrix::Zero(4, 4);
    bad.diagonal() << -0.25, 0.25, 0.5, 0.5;
    CHECK_THROWS_AS(DensityMatrix(pair_layout("A", "B"), bad).validate(), NumericalError);
    CHECK_THROWS_AS(DensityMatrix(pair_layout("A", "B"), ComplexMatrix::Identity(4, 4)), NumericalError);
    CHECK_THROWS_AS(DensityMatrix(pair_layout("A", "B"), ComplexMatrix::Identity(2, 2)), DomainError);
  }

  TEST_CASE("conjugate matches a dense Kronecker oracle") {
    std::mt19937_64 rng(7);
    const ComplexMatrix rho = random_density(rng, 8);
    const ComplexMatrix h = hadamard();
    // H on qubit 2, CNOT 0 -> 1
    const std::array<std::size_t, 1> p2{2};
    const ComplexMatrix got = conjugate(rho, h, p2, 3);
    const oracle::Mat u = oracle::kron({oracle::I2(), oracle::I2(), h});
    CHECK((got - u * rho * u.adjoint()).norm() < 1e-12);

    // two-qubit op on non-adjacent, reversed positions
    const std::array<std::size_t, 2> p20{2, 0};
    const ComplexMatrix cx = oracle::cnot(0, 1, 2);
    const oracle::Mat ref = oracle::cnot(2, 0, 3);
    CHECK((conjugate(rho, cx, p20, 3) - ref * rho * ref.adjoint()).norm() < 1e-12);
    CHECK((apply(rho.col(0), cx, p20, 3) - ref * rho.col(0)).norm() < 1e-12);
  }

  TEST_CASE("partial trace and reorder") {
    std::mt19937_64 rng(3);
    const DensityMatrix a(pair_layout("A1", "B1"), random_density(rng, 4));
    const DensityMatrix b(pair_layout("A2", "B2"), random_density(rng, 4));
    const DensityMatrix ab = tensor(a, b);
    const std::vector<std::string> keep1{"A1", "B1"}, keep2{"B2", "A2"};
    CHECK((partial_trace(ab, keep1).matrix() - a.matrix()).norm() < 1e-12);
    CHECK((partial_trace(ab, keep2).matrix() - b.matrix()).norm() < 1e-12);

    const DensityMatrix r = reorder(ab, four_qubits());
    const DensityMatrix back = reorder(r, ab.layout());
    CHECK((back.matrix() - ab.matrix()).norm() < 1e-12);
    CHECK(std::abs(r.matrix().trace().real() - 1.0) < 1e-12);
    CHECK((partial_trace(r, keep1).matrix() - a.matrix()).norm() < 1e-12);
  }

  TEST_CASE("schmidt decomposition agrees with SVD oracle and reconstructs") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
      const PureState psi(four_qubits(), random_vector(rng, 16));
      const auto sd = schmidt_decompose(psi);
      oracle::Mat m(4, 4);
      for (int i = 0; i < 16; ++i) m(i / 4, i % 4) = psi.amplitudes()(i);
      const auto ref = oracle::schmidt_of(m);
      REQUIRE(sd.coefficients.size() == 4);
      for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs(sd.coefficients[i] - ref[i]) < 1e-12);
      CHECK(fidelity(sd.reconstruct(), reorder(psi, sd.reconstruct().layout())) == doctest::Approx(1.0).epsilon(1e-12));
    }
  }

  TEST_CASE("schmidt product of two pairs") {
    std::mt19937_64 rng(5);
    const PureState a(pair_layout("A1", "B1"), random_vector(rng, 4));
    const PureState b(pair_layout("A2", "B2"), random_vector(rng, 4));
    const auto p = schmidt_product(schmidt_decompose(a), schmidt_decompose(b));
    const auto direct = schmidt_decompose(tensor(a, b));
    for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs(p.coefficients[i] - direct.coefficients[i]) < 1e-12);
    const PureState full = tensor(a, b);
    CHECK(fidelity(p.reconstruct(), reorder(full, p.reconstruct().layout())) == doctest::Approx(1.0).epsilon(1e-12));
  }

  TEST_CASE("fidelity, top eigenstate and channels") {
    const PureState phi(pair_layout("A", "B"), oracle::phi_plus());
    const DensityMatrix w(pair_layout("A", "B"), oracle::werner(0.8));
    CHECK(fidelity(w, phi) == doctest::Approx(0.8).epsilon(1e-12));
    const auto top = top_eigenstate(w);
    CHECK(top.eigenvalue == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(!top.degenerate);
    CHECK(fidelity(top.state, phi) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(top_eigenstate(DensityMatrix::maximally_mixed(pair_layout("A", "B"))).degenerate);

    // bit flip with probability 0.3 on B
    const std::vector<ComplexMatrix> kraus{std::sqrt(0.7) * ComplexMatrix::Identity(2, 2), std::sqrt(0.3) * pauli_x()};
    const std::vector<std::string> on{"B"};
    const DensityMatrix out = apply_channel(DensityMatrix::from_pure(phi), kraus, on);
    CHECK(fidelity(out, phi) == doctest::Approx(0.7).epsilon(1e-12));
    const std::vector<ComplexMatrix> not_tp{pauli_x() * 0.5};
    CHECK_THROWS_AS(apply_channel(out, not_tp, on), DomainError);
  }

  TEST_CASE("permutation matrix convention") {
    const std::vector<std::size_t> perm{2, 0, 1};
    Eigen::Vector3d v(10, 20, 30);
    const Eigen::Vector3d pv = permutation_matrix(perm) * v;
    CHECK(pv(0) == 30);
    CHECK(pv(1) == 10);
    CHECK(pv(2) == 20);
  }
}
