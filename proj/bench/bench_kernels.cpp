// Serial reference against the OpenMP path for the trial-level kernels, and the
// matrix gradient against its per-sample reference loops.

#include <benchmark/benchmark.h>

#include "infolearn/bayes_agent.hpp"
#include "infolearn/bounds.hpp"
#include "infolearn/dgp.hpp"
#include "infolearn/experiment.hpp"
#include "infolearn/nn_train.hpp"

using namespace infolearn;

namespace {

Exec exec_of(const benchmark::State& state) { return state.range(0) == 0 ? Exec::Serial : Exec::Parallel; }

void BM_LayerStability(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(mc_layer_stability(16, 16, true, 20000, 1, exec_of(state)).mean);
  state.SetLabel(state.range(0) == 0 ? "serial" : "openmp");
}
BENCHMARK(BM_LayerStability)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_LinRegRegret(benchmark::State& state) {
  RegretOptions opts;
  opts.exec = exec_of(state);
  for (auto _ : state) benchmark::DoNotOptimize(simulate_regret(LinRegSpec{8, 0.1, {}}, 200, 500, 2, opts).total());
  state.SetLabel(state.range(0) == 0 ? "serial" : "openmp");
}
BENCHMARK(BM_LinRegRegret)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_TeachSweep(benchmark::State& state) {
  ExperimentConfig cfg;
  cfg.trials = 4;
  cfg.t_cap = 64;
  cfg.exec = exec_of(state);
  const std::vector<Gamma> grid{Gamma::independent(2, 2, 0.1), Gamma::independent(4, 4, 0.1)};
  for (auto _ : state) benchmark::DoNotOptimize(sweep(grid, cfg, 3).records.size());
  state.SetLabel(state.range(0) == 0 ? "serial" : "openmp");
}
BENCHMARK(BM_TeachSweep)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

template <bool Reference>
void BM_Grad(benchmark::State& state) {
  Rng rng(4);
  const int width = static_cast<int>(state.range(0));
  const MlpModel m = mlp_init({8, width, 1}, rng);
  const Eigen::MatrixXd X = standard_normal_matrix(8, 64, rng);
  const Eigen::VectorXd y = standard_normal_vector(64, rng);
  Eigen::VectorXd g;
  for (auto _ : state) benchmark::DoNotOptimize(Reference ? grad_reference(m, X, y, g) : grad(m, X, y, g));
}
BENCHMARK_TEMPLATE(BM_Grad, false)->Arg(16)->Arg(128);
BENCHMARK_TEMPLATE(BM_Grad, true)->Arg(16)->Arg(128);

}  // namespace

BENCHMARK_MAIN();
