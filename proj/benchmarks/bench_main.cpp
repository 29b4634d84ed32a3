#include <benchmark/benchmark.h>

#include <random>

#include "ecsim/majorize.hpp"
#include "ecsim/noise.hpp"
#include "ecsim/protocols.hpp"

using namespace ecsim;

namespace {

qmath::DensityMatrix pair(double a, double p_d) {
  noise::NoiseParams p;
  p.a = a;
  p.p_d = p_d;
  return noise::prepare_state(p);
}

void BM_Birkhoff(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(1);
  std::vector<double> beta(d);
  std::exponential_distribution<double> e;
  for (auto& x : beta) x = e(rng);
  double s = 0;
  for (double x : beta) s += x;
  for (auto& x : beta) x /= s;
  std::vector<double> alpha(d, 1.0 / static_cast<double>(d));
  const auto D = majorize::build_doubly_stochastic(SchmidtVector::sorted(alpha), SchmidtVector::sorted(beta));
  for (auto _ : state) benchmark::DoNotOptimize(majorize::birkhoff_decompose(D));
}
BENCHMARK(BM_Birkhoff)->Arg(4)->Arg(8)->Arg(16);

void BM_Nec(benchmark::State& state) {
  const auto rho = pair(0.15, 0.05);
  for (auto _ : state) benchmark::DoNotOptimize(protocols::run_nec(rho, rho, 1, 0.005));
}
BENCHMARK(BM_Nec)->Unit(benchmark::kMillisecond);

void BM_Cec(benchmark::State& state) {
  const auto rho = pair(0.15, 0.05);
  const auto cat = protocols::best_catalyst(rho, rho);
  for (auto _ : state) benchmark::DoNotOptimize(protocols::run_cec(rho, rho, cat, 1, 0.005));
}
BENCHMARK(BM_Cec)->Unit(benchmark::kMillisecond);

void BM_CatalystSearch(benchmark::State& state) {
  const auto rho = pair(0.15, 0.05);
  for (auto _ : state) benchmark::DoNotOptimize(protocols::best_catalyst(rho, rho));
}
BENCHMARK(BM_CatalystSearch)->Unit(benchmark::kMillisecond);

void BM_DistillationSearch(benchmark::State& state) {
  const auto rho = pair(0.15, 0.05);
  for (auto _ : state) benchmark::DoNotOptimize(protocols::optimize_distillation(rho, rho, 0.005));
}
BENCHMARK(BM_DistillationSearch)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
