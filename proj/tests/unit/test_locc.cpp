#include <doctest.h>

#include <random>

#include "../support/oracles.hpp"
#include "ecsim/errors.hpp"
#include "ecsim/locc.hpp"
#include "ecsim/majorize.hpp"
#include "ecsim/noise.hpp"

using namespace ecsim;
using namespace ecsim::locc;
using qmath::DensityMatrix;
using qmath::Layout;
using qmath::Party;
using qmath::PureState;

namespace {

Layout parties(std::size_t n) {
  std::vector<qmath::Qubit> q;
  for (std::size_t i = 0; i < n; ++i) q.push_back({"A" + std::to_string(i + 1), Party::alice});
  for (std::size_t i = 0; i < n; ++i) q.push_back({"B" + std::to_string(i + 1), Party::bob});
  return Layout(q);
}

PureState random_state(std::mt19937_64& rng, const Layout& l) {
  std::normal_distribution<double> n;
  qmath::ComplexVector v(static_cast<Eigen::Index>(l.dim()));
  for (auto& x : v) x = {n(rng), n(rng)};
  return PureState(l, v.normalized());
}

// Bell pair on (A1, B1), |0> on the rest.
PureState bell_target(const Layout& l) {
  qmath::ComplexVector v = qmath::ComplexVector::Zero(static_cast<Eigen::Index>(l.dim()));
  const std::size_t n = l.size();
  v(0) = 1.0 / std::sqrt(2.0);
  v(static_cast<Eigen::Index>((std::size_t{1} << (n - 1)) | (std::size_t{1} << (n / 2 - 1)))) = 1.0 / std::sqrt(2.0);
  return PureState(l, v);
}

DiagonalPOVM random_two_outcome(std::mt19937_64& rng, std::size_t d) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  DiagonalPOVM p;
  p.elements.assign(2, std::vector<double>(d));
  for (std::size_t j = 0; j < d; ++j) {
    p.elements[0][j] = u(rng);
    p.elements[1][j] = 1.0 - p.elements[0][j];
  }
  Permutation id(d);
  std::iota(id.begin(), id.end(), 0);
  p.corrections = {id, id};
  p.weights = {0.5, 0.5};
  p.support.assign(d, true);
  return p;
}

Round round_from(const DiagonalPOVM& p, const std::vector<std::string>& data) {
  Round r;
  r.povm = p;
  r.unitary = embed_povm(p);
  const std::vector<std::string> aux{"Aaux0"};
  r.synthesis = synthesize(r.unitary, data, aux);
  return r;
}

}  // namespace

TEST_SUITE("locc") {
  TEST_CASE("Jensen-Schack POVM reproduces the target frame") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 100; ++trial) {
      const std::size_t d = 2 + rng() % 6;
      const auto beta = oracle::random_probabilities(rng, d, rng() % (d - 1));
      auto alpha = beta;
      const std::size_t j = rng() % (d - 1);
      const double t = std::uniform_real_distribution<double>(0.5, 1.0)(rng);
      majorize::TTransform tt{j, j + 1, t};
      tt.apply(alpha);
      const auto D = majorize::DoublyStochastic(tt.matrix(d));
      const auto povm = js_povm(alpha, beta, D);
      povm.validate();
      double total = 0.0;
      for (std::size_t m = 0; m < povm.outcome_count(); ++m) {
        double w = 0.0;
        std::vector<double> post(d);
        for (std::size_t i = 0; i < d; ++i) {
          post[i] = povm.elements[m][i] * alpha[i];
          w += post[i];
        }
        CHECK(w == doctest::Approx(povm.weights[m]).epsilon(1e-10));
        total += w;
        if (w < 1e-14) continue;
        // Relabeling |i> -> |perm[i]> lands on the target vector.
        std::vector<double> moved(d, 0.0);
        for (std::size_t i = 0; i < d; ++i) moved[povm.corrections[m][i]] += post[i] / w;
        for (std::size_t i = 0; i < d; ++i) CHECK(std::abs(moved[i] - beta[i]) < 1e-10);
      }
      CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    }
  }

  TEST_CASE("multi-transform rounds keep at most d outcomes") {
    std::mt19937_64 rng(33);
    for (int trial = 0; trial < 100; ++trial) {
      const std::size_t d = 3 + rng() % 6;
      const auto beta = oracle::random_probabilities(rng, d);
      std::vector<double> alpha = beta;
      Eigen::MatrixXd D = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
      for (int s = 0; s < 5; ++s) {
        const std::size_t j = rng() % d, k = rng() % d;
        if (j == k) continue;
        const majorize::TTransform tt{std::min(j, k), std::max(j, k), std::uniform_real_distribution<double>(0.1, 0.9)(rng)};
        tt.apply(alpha);
        D = tt.matrix(d) * D;
      }
      const auto povm = js_povm(alpha, beta, majorize::DoublyStochastic(D));
      CHECK(povm.outcome_count() <= d);
      double total = 0.0;
      for (std::size_t m = 0; m < povm.outcome_count(); ++m) {
        std::vector<double> moved(d, 0.0);
        for (std::size_t i = 0; i < d; ++i) moved[povm.corrections[m][i]] += povm.elements[m][i] * alpha[i];
        for (std::size_t i = 0; i < d; ++i) CHECK(std::abs(moved[i] - povm.weights[m] * beta[i]) < 1e-10);
        total += povm.weights[m];
      }
      CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    }
  }

  TEST_CASE("Naimark dilation statistics and synthesis") {
    std::mt19937_64 rng(37);
    for (int trial = 0; trial < 50; ++trial) {
      const auto p = random_two_outcome(rng, 4);
      const auto u = embed_povm(p);
      const Eigen::MatrixXd U = u.assembled();
      CHECK((U.transpose() * U - Eigen::MatrixXd::Identity(8, 8)).norm() < 1e-12);
      for (std::size_t j = 0; j < 4; ++j)
        for (std::size_t m = 0; m < 2; ++m) {
          const double amp = U(static_cast<Eigen::Index>(2 * j + m), static_cast<Eigen::Index>(2 * j));
          CHECK(amp * amp == doctest::Approx(p.elements[m][j]).epsilon(1e-12));
        }
      const std::vector<std::string> data{"A1", "A2"}, aux{"Aaux0"};
      const auto s = synthesize(u, data, aux);
      std::size_t non_identity = 0;
      for (bool id : u.identity) non_identity += id ? 0 : 1;
      CHECK(s.mcx_count() == 2 * non_identity);
      CHECK(s.exact);
      CHECK((s.product(4, 1) - U).norm() < 1e-12);
      for (const auto& b : s.blocks)
        for (const auto& g : b.mcx) CHECK(g.touched == std::vector<std::string>{"A1", "A2", "Aaux0"});
    }
  }

  TEST_CASE("multi-element rounds need opt-in") {
    DiagonalPOVM p;
    p.elements = {{0.5, 0.2}, {0.3, 0.3}, {0.2, 0.5}};
    p.corrections = {{0, 1}, {0, 1}, {0, 1}};
    p.weights = {1.0 / 3, 1.0 / 3, 1.0 / 3};
    p.support = {true, true};
    const auto u = embed_povm(p);
    CHECK(u.aux_count == 2);
    const std::vector<std::string> data{"A1"}, aux{"Aaux0", "Aaux1"};
    CHECK_THROWS_AS(synthesize(u, data, aux), DomainError);
    const auto s = synthesize(u, data, aux, true);
    CHECK(!s.exact);
    CHECK(s.mcx_count() == 2 * 2 * 2);
  }

  TEST_CASE("dense and compact auxiliary paths agree") {
    std::mt19937_64 rng(41);
    const Layout data = parties(2);
    for (double pg : {0.0, 0.01, 0.2}) {
      const auto p = random_two_outcome(rng, 4);
      const Round r = round_from(p, {"A1", "A2"});
      const DensityMatrix rho = DensityMatrix::from_pure(random_state(rng, data));
      const auto compact = execute_round(rho, r, pg);

      const Layout aux_l({{"Aaux0", Party::alice, qmath::Role::auxiliary}});
      const DensityMatrix with_aux = qmath::tensor(rho, DensityMatrix::from_pure(PureState::basis(aux_l, 0)));
      const auto dense = execute_round(with_aux, r, pg);
      REQUIRE(dense.size() == compact.size());
      const auto keep = data.all_labels();
      for (std::size_t i = 0; i < dense.size(); ++i) {
        CHECK(dense[i].outcome == compact[i].outcome);
        CHECK(dense[i].weight == doctest::Approx(compact[i].weight).epsilon(1e-12));
        CHECK((qmath::partial_trace(dense[i].state, keep).matrix() - compact[i].state.matrix()).norm() < 1e-10);
      }
    }
  }

  TEST_CASE("filter dilation equals the filter operator at p_g = 0") {
    std::mt19937_64 rng(43);
    const Layout l = parties(2);
    qmath::ComplexVector v = qmath::ComplexVector::Zero(16);
    v(0) = std::sqrt(0.7), v(5) = std::sqrt(0.2), v(10) = std::sqrt(0.06), v(15) = std::sqrt(0.04);
    const auto s = compile_schedule(PureState(l, v), bell_target(l), 1);
    REQUIRE(!s.filter.trivial);
    const DensityMatrix rho = DensityMatrix::from_pure(random_state(rng, l));
    const auto direct = execute_filter(rho, s.filter);
    const auto branches = execute_round(rho, s.filter.dilation, 0.0);
    const auto ok = std::find_if(branches.begin(), branches.end(), [](const Branch& b) { return b.outcome == 0; });
    REQUIRE(ok != branches.end());
    CHECK(ok->weight == doctest::Approx(direct.weight).epsilon(1e-12));
    CHECK((ok->state.matrix() - direct.state.matrix()).norm() < 1e-10);
  }

  TEST_CASE("correction relabels both parties") {
    const Layout l = parties(1);
    const DensityMatrix rho = DensityMatrix::from_pure(PureState::basis(l, 0));
    const std::vector<std::string> a{"A1"}, b{"B1"};
    const auto out = apply_correction(rho, {1, 0}, a, b);
    CHECK(std::abs(out.matrix()(3, 3).real() - 1.0) < 1e-15);
  }

  TEST_CASE("conclusive protocol on pure surrogates is exact") {
    std::mt19937_64 rng(47);
    for (int trial = 0; trial < 30; ++trial) {
      const std::size_t n = 1 + rng() % 3;
      const Layout l = parties(n);
      const PureState psi = random_state(rng, l), phi = random_state(rng, l);
      const auto a = qmath::schmidt_decompose(psi).coefficients;
      const auto b = qmath::schmidt_decompose(phi).coefficients;
      for (std::size_t g : {std::size_t{1}, std::size_t{2}, kAllTransforms}) {
        const auto s = compile_schedule(psi, phi, g);
        CHECK(s.success_probability == doctest::Approx(oracle::vidal(a.values(), b.values())).epsilon(1e-9));
        const auto run = execute_schedule(s, DensityMatrix::from_pure(psi), 0.0);
        CHECK(run.success_probability == doctest::Approx(s.success_probability).epsilon(1e-9));
        CHECK(qmath::fidelity(run.output, qmath::reorder(phi, s.layout)) == doctest::Approx(1.0).epsilon(1e-9));
        if (g == kAllTransforms) CHECK(s.rounds.size() <= 1);
      }
    }
  }

  TEST_CASE("rank violations and schedule JSON") {
    const Layout l = parties(1);
    const PureState product = PureState::basis(l, 0);
    CHECK_THROWS_AS(compile_schedule(product, bell_target(l), 1), DomainError);
    std::mt19937_64 rng(53);
    const auto s = compile_schedule(random_state(rng, parties(2)), bell_target(parties(2)), 1);
    const auto j = to_json(s);
    CHECK(j["rounds"].size() == s.rounds.size());
    CHECK(j["total_mcx"].get<std::size_t>() == s.total_mcx());
    CHECK(j["alice_data"] == nlohmann::json({"A1", "A2"}));
  }
}
