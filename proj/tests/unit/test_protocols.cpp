#include <doctest.h>

#include <random>

#include "../support/oracles.hpp"
#include "ecsim/errors.hpp"
#include "ecsim/majorize.hpp"
#include "ecsim/noise.hpp"
#include "ecsim/protocols.hpp"

using namespace ecsim;
using namespace ecsim::protocols;
using qmath::DensityMatrix;

namespace {

DensityMatrix pair_state(double a, double p_d) {
  noise::NoiseParams p;
  p.a = a;
  p.p_d = p_d;
  return noise::prepare_state(p);
}

// Schmidt vector of two copies of the coherent pair.
std::vector<double> two_copies(double a) {
  const auto s = qmath::schmidt_decompose(noise::coherent_state(a)).coefficients;
  return {s[0] * s[0], s[0] * s[1], s[1] * s[0], s[1] * s[1]};
}

std::vector<double> with_catalyst(const std::vector<double>& v, double c1) {
  std::vector<double> out;
  for (double x : v)
    for (double c : {c1, 1.0 - c1}) out.push_back(x * c);
  return out;
}

}  // namespace

TEST_SUITE("protocols") {
  TEST_CASE("Clifford table") {
    const auto& cs = single_qubit_cliffords();
    REQUIRE(cs.size() == 24);
    CHECK((cs[0] - qmath::ComplexMatrix::Identity(2, 2)).norm() < 1e-12);
    for (std::size_t i = 0; i < cs.size(); ++i) {
      CHECK((cs[i].adjoint() * cs[i] - qmath::ComplexMatrix::Identity(2, 2)).norm() < 1e-12);
      for (std::size_t j = 0; j < i; ++j) CHECK(std::abs((cs[i].adjoint() * cs[j]).trace()) < 2.0 - 1e-9);
    }
    for (std::size_t i = 0; i < DistillationPlan::kCount; i += 97)
      CHECK(DistillationPlan::from_index(i).index() == i);
    CHECK_THROWS_AS(DistillationPlan::from_index(DistillationPlan::kCount), DomainError);
  }

  TEST_CASE("DEJMPS matches the brute-force oracle") {
    const DensityMatrix w(qmath::pair_layout("A", "B"), oracle::werner(0.8));
    const auto r = run_distillation(w, w, DistillationPlan::dejmps(), 0.0);
    const auto o = oracle::dejmps(oracle::werner(0.8));
    const double q = 0.2 / 3.0;
    const auto closed = oracle::dejmps_closed(0.8, q, q, q);
    CHECK(r.output_fidelity == doctest::Approx(o.fidelity).epsilon(1e-12));
    CHECK(r.success_probability == doctest::Approx(o.success).epsilon(1e-12));
    CHECK(o.fidelity == doctest::Approx(closed.fidelity).epsilon(1e-12));
    CHECK(o.success == doctest::Approx(closed.success).epsilon(1e-12));
    CHECK((r.output_state.matrix() - r.output_state.matrix().adjoint()).norm() < 1e-12);
  }

  TEST_CASE("every plan keeps perfect pairs perfect") {
    const DensityMatrix phi = DensityMatrix::from_pure(noise::bell_state(noise::Bell::phi_plus));
    for (std::size_t i = 0; i < DistillationPlan::kCount; i += 5) {
      const auto r = run_distillation(phi, phi, DistillationPlan::from_index(i), 0.0);
      CHECK(r.output_fidelity == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(r.success_probability == doctest::Approx(1.0).epsilon(1e-12));
    }
  }

  TEST_CASE("optimized plan is never worse than DEJMPS") {
    std::mt19937_64 rng(61);
    for (int trial = 0; trial < 4; ++trial) {
      auto c = oracle::random_probabilities(rng, 4);
      const DensityMatrix rho(qmath::pair_layout("A", "B"), oracle::bell_diagonal(c[0], c[1], c[2], c[3]));
      const auto best = optimize_distillation(rho, rho, 0.0);
      const double f_best = run_distillation(rho, rho, best, 0.0).output_fidelity;
      CHECK(f_best >= run_distillation(rho, rho, DistillationPlan::dejmps(), 0.0).output_fidelity - 1e-12);
    }
  }

  TEST_CASE("catalyst search on a textbook example") {
    const SchmidtVector psi({0.4, 0.4, 0.1, 0.1}), phi({0.5, 0.25, 0.25, 0.0});
    CHECK(!majorize::is_majorized(psi, phi));
    const auto c = find_catalyst(psi, phi);
    CHECK(c.schmidt.size() == 2);
    const double c1 = c.schmidt[0];
    CHECK(oracle::vidal(with_catalyst(psi.values(), c1), with_catalyst(phi.values(), c1)) ==
          doctest::Approx(1.0).epsilon(1e-12));
    CHECK(oracle::majorized(with_catalyst(psi.values(), 0.6), with_catalyst(phi.values(), 0.6)));
    CHECK(CatalystSpec::from_c1(1.0).is_product());
    CHECK_THROWS_AS(CatalystSpec::from_c1(0.4), DomainError);
  }

  TEST_CASE("noise-free concentration") {
    const DensityMatrix bell = pair_state(0.0, 0.0);
    const auto perfect = run_nec(bell, bell, 1, 0.0);
    CHECK(perfect.success_probability == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(perfect.output_fidelity == doctest::Approx(1.0).epsilon(1e-12));

    for (double a : {0.05, 0.15, 0.3}) {
      const DensityMatrix rho = pair_state(a, 0.0);
      const std::vector<double> bell_v{0.5, 0.5};
      const auto nec = run_nec(rho, rho, 1, 0.0);
      CHECK(nec.success_probability == doctest::Approx(oracle::vidal(two_copies(a), bell_v)).epsilon(1e-9));
      CHECK(nec.output_fidelity == doctest::Approx(1.0).epsilon(1e-9));

      const auto cat = best_catalyst(rho, rho);
      const auto cec = run_cec(rho, rho, cat, 1, 0.0);
      const double c1 = cat.schmidt[0];
      CHECK(cec.success_probability ==
            doctest::Approx(oracle::vidal(with_catalyst(two_copies(a), c1), with_catalyst(bell_v, c1))).epsilon(1e-9));
      CHECK(cec.output_fidelity == doctest::Approx(1.0).epsilon(1e-9));
      CHECK(cec.success_probability >= nec.success_probability - 1e-9);
      REQUIRE(cec.catalyst_fidelity_after.has_value());
      CHECK(*cec.catalyst_fidelity_after == doctest::Approx(1.0).epsilon(1e-9));

      const auto again = reuse_catalyst(cec, rho, rho, 1, 0.0);
      CHECK(again.success_probability == doctest::Approx(cec.success_probability).epsilon(1e-9));
    }
  }

  TEST_CASE("gate accounting per round") {
    const DensityMatrix rho = pair_state(0.15, 0.05);
    const auto nec_s = nec_schedule(rho, rho, 1);
    for (const auto& r : nec_s.rounds) CHECK(r.synthesis.mcx_count() <= 8);
    const auto cec_s = cec_schedule(rho, rho, best_catalyst(rho, rho), 1);
    for (const auto& r : cec_s.rounds) CHECK(r.synthesis.mcx_count() <= 16);
    const auto res = run_nec(rho, rho, 1, 0.0);
    CHECK(res.gate_counts.alice == nec_s.total_mcx());
    const auto j = to_json(res);
    CHECK(j["protocol"] == "nec");
    CHECK(j.contains("success_probability"));
  }

  TEST_CASE("invalid inputs") {
    const DensityMatrix rho = pair_state(0.1, 0.0);
    CHECK_THROWS_AS(run_nec(rho, rho, 1, 1.5), DomainError);
    const DensityMatrix three = qmath::tensor(rho, DensityMatrix::maximally_mixed(qmath::pair_layout("X", "Y")));
    CHECK_THROWS_AS(run_nec(three, rho, 1, 0.0), DomainError);
    CHECK_THROWS_AS(run_distillation(three, rho, DistillationPlan::dejmps(), 0.0), DomainError);
  }
}
