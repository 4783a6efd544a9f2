#include <random>

#include <benchmark/benchmark.h>

#include "exitmoment/augment/augment.hpp"
#include "exitmoment/conic/psd.hpp"
#include "exitmoment/conic/solver.hpp"
#include "exitmoment/generator/generator.hpp"
#include "exitmoment/mc/simulate.hpp"
#include "exitmoment/moment/problem.hpp"
#include "models.hpp"

namespace {

using namespace exitmoment;

void BM_AugmentSpringMass(benchmark::State& state) {
  const auto m = testing::spring_model();
  for (auto _ : state) benchmark::DoNotOptimize(augment::augment_sinusoids(m));
}
BENCHMARK(BM_AugmentSpringMass)->Unit(benchmark::kMicrosecond);

void BM_MartingaleRowsSpringMass(benchmark::State& state) {
  const auto aug = augment::augment_sinusoids(testing::spring_model());
  const generator::Generator gen(aug);
  const int K = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(generator::emit_all_rows(gen, aug.x0, K));
}
BENCHMARK(BM_MartingaleRowsSpringMass)->Arg(6)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_AssembleSpringMass(benchmark::State& state) {
  const auto aug = augment::augment_sinusoids(testing::spring_model());
  moment::AssemblyOptions opts;
  opts.K = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(moment::assemble(aug, opts));
}
BENCHMARK(BM_AssembleSpringMass)->Arg(6)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_SolveBrownian(benchmark::State& state) {
  const auto aug = augment::augment_sinusoids(testing::brownian_model());
  moment::AssemblyOptions opts;
  opts.K = static_cast<int>(state.range(0));
  opts.sense = conic::Sense::kMinimize;
  const auto prog = moment::assemble(aug, opts);
  for (auto _ : state) benchmark::DoNotOptimize(conic::solve(prog));
}
BENCHMARK(BM_SolveBrownian)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_ProjectPsd(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto method = state.range(1) == 0 ? conic::EigenMethod::kTridiagonalQr : conic::EigenMethod::kJacobi;
  std::mt19937 rng(1);
  std::normal_distribution<double> g;
  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = g(rng);
  a = (a + a.transpose()).eval();
  for (auto _ : state) benchmark::DoNotOptimize(conic::project_psd(a, method));
}
BENCHMARK(BM_ProjectPsd)
    ->ArgNames({"n", "jacobi"})
    ->Args({21, 0})
    ->Args({56, 0})
    ->Args({126, 0})
    ->Args({21, 1})
    ->Args({56, 1})
    ->Unit(benchmark::kMicrosecond);

void BM_MonteCarloBrownian(benchmark::State& state) {
  const auto m = testing::brownian_model();
  mc::McConfig cfg;
  cfg.paths = 1000;
  cfg.dt = 1e-3;
  for (auto _ : state) benchmark::DoNotOptimize(mc::simulate_exit(m, cfg));
  // About 250 steps per path at E[tau] = 0.25.
  state.SetItemsProcessed(state.iterations() * cfg.paths);
}
BENCHMARK(BM_MonteCarloBrownian)->Unit(benchmark::kMillisecond);

void BM_MonteCarloSpringMass(benchmark::State& state) {
  const auto m = testing::spring_model();
  mc::McConfig cfg;
  cfg.paths = 100;
  cfg.dt = 1e-3;
  for (auto _ : state) benchmark::DoNotOptimize(mc::simulate_exit(m, cfg));
  state.SetItemsProcessed(state.iterations() * cfg.paths);
}
BENCHMARK(BM_MonteCarloSpringMass)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
