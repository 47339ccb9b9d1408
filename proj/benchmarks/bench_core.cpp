#include <benchmark/benchmark.h>

#include <numbers>

#include "fracbayes/bayes.hpp"
#include "fracbayes/diagnostics.hpp"
#include "fracbayes/extension.hpp"

namespace fb = fracbayes;

namespace {

constexpr double kPi = std::numbers::pi;

void BM_Eigendecompose(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const fb::Mesh1D mesh(-kPi, kPi, n);
  const fb::AssembledOperator op = fb::assemble(mesh, fb::Coefficient::constant(n, 1.0));
  for (auto _ : state) benchmark::DoNotOptimize(fb::eigendecompose(op, fb::default_mode_count(n + 1)));
}
BENCHMARK(BM_Eigendecompose)->Arg(128)->Arg(512)->Arg(1024)->Arg(2048)->Unit(benchmark::kMillisecond);

void BM_ForwardEvaluate(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const fb::Mesh1D mesh(-kPi, kPi, 1024);
  const fb::SpectralForwardMap map(fb::assemble(mesh, fb::Coefficient::constant(1024, 1.0)),
                                   fb::analytic_source_field(0.5, mesh),
                                   fb::grid_observation_setup(m, 0.1, -kPi, kPi));
  double s = 0.3;
  for (auto _ : state) {
    benchmark::DoNotOptimize(map.evaluate(s));
    s = s < 0.9 ? s + 1e-3 : 0.3;
  }
}
BENCHMARK(BM_ForwardEvaluate)->Arg(1)->Arg(100)->Arg(10000)->Unit(benchmark::kMicrosecond);

void BM_PosteriorGrid(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const fb::Mesh1D mesh(-kPi, kPi, 1024);
  const fb::ObservationSetup setup = fb::grid_observation_setup(m, 0.075, -kPi, kPi);
  const fb::SpectralForwardMap map(fb::assemble(mesh, fb::Coefficient::constant(1024, 1.0)),
                                   fb::analytic_source_field(0.5, mesh), setup);
  const fb::DataVector data = fb::add_noise(map.evaluate(0.7), setup, 1);
  const fb::OrderPrior prior(0.0, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(fb::posterior_grid_1d(data, prior, map));
}
BENCHMARK(BM_PosteriorGrid)->Arg(100)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_ExtensionSolve(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const fb::Mesh1D mesh(-kPi, kPi, n);
  const fb::Coefficient a = fb::Coefficient::constant(n, 1.0);
  const fb::Field f = fb::analytic_source_field(0.5, mesh);
  const fb::ExtensionGrid grid = fb::make_extension_grid(mesh, 0.5, n / 2);
  for (auto _ : state) benchmark::DoNotOptimize(fb::solve_extension(a, 0.5, f, grid));
}
BENCHMARK(BM_ExtensionSolve)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_OpNormDiff(benchmark::State& state) {
  const fb::Mesh1D mesh(-kPi, kPi, static_cast<int>(state.range(0)));
  const fb::CoefficientPrior kl(16, 2.0, 0.5);
  std::mt19937_64 rng(3);
  const auto [a, b] = fb::realize_pair(fb::draw_coefficient_pair(kl, rng), kl, mesh, 0.1);
  for (auto _ : state) benchmark::DoNotOptimize(fb::op_norm_diff(mesh, a, b));
}
BENCHMARK(BM_OpNormDiff)->Arg(128)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_PcnStep(benchmark::State& state) {
  const fb::Mesh1D mesh(-kPi, kPi, 128);
  const fb::PriorConfig prior{fb::OrderPrior(0.0, 1.0), fb::CoefficientPrior(8, 2.0, 0.5)};
  const fb::ObservationSetup setup = fb::grid_observation_setup(20, 0.05, -kPi, kPi);
  fb::JointForwardModel model(mesh, fb::analytic_source_field(0.5, mesh), setup, prior.coefficient, 64);
  const fb::DataVector data = fb::synth_data(0.7, fb::Coefficient::constant(128, 1.0), 0.5, mesh, setup, 1);
  fb::McmcOptions options;
  options.n_steps = 100;
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(fb::pcn_mcmc(data, model, prior, options, ++seed));
  state.SetItemsProcessed(state.iterations() * options.n_steps);
}
BENCHMARK(BM_PcnStep)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
