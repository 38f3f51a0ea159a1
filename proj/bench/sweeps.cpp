// Serial reference loops against their OpenMP counterparts on a simulated
// data set. Benchmark args: {respondents, threads}; threads is ignored by the
// serial variants.

#include <benchmark/benchmark.h>

#include "bjme/kernels.hpp"
#include "bjme/simulate.hpp"

namespace {

using namespace bjme;

struct Workload {
  ResponseData data;
  ModelState start;
  Hyperparameters hyper = Hyperparameters::identity(3, 10.0);
};

Workload make_workload(Index n) {
  SimDesign d;
  d.n = n;
  d.seed = 1;
  const auto truth = gen_true_params(d);
  Workload w;
  w.data = sample_responses(truth.state, std::vector<int>(d.j, 4), d.seed);
  w.hyper = Hyperparameters(truth.sigma, 10.0);
  w.start = random_init(w.data, w.hyper, 2, StartStrategy::sparse_positive);
  return w;
}

FitConfig config(const benchmark::State& state) {
  FitConfig cfg;
  cfg.threads = static_cast<int>(state.range(1));
  return cfg;
}

void BM_ThetaSerial(benchmark::State& state) {
  const auto w = make_workload(state.range(0));
  const auto cfg = config(state);
  for (auto _ : state) {
    ModelState s = w.start;
    kernels::theta_phase_serial(w.data, s, w.hyper, cfg);
    benchmark::DoNotOptimize(s.theta.data());
  }
}

void BM_ThetaParallel(benchmark::State& state) {
  const auto w = make_workload(state.range(0));
  const auto cfg = config(state);
  for (auto _ : state) {
    ModelState s = w.start;
    kernels::theta_phase_parallel(w.data, s, w.hyper, cfg);
    benchmark::DoNotOptimize(s.theta.data());
  }
}

void BM_ItemSerial(benchmark::State& state) {
  const auto w = make_workload(state.range(0));
  const auto cfg = config(state);
  for (auto _ : state) {
    ModelState s = w.start;
    kernels::item_phase_serial(w.data, s, w.hyper, cfg);
    benchmark::DoNotOptimize(s.loadings.data());
  }
}

void BM_ItemParallel(benchmark::State& state) {
  const auto w = make_workload(state.range(0));
  const auto cfg = config(state);
  for (auto _ : state) {
    ModelState s = w.start;
    kernels::item_phase_parallel(w.data, s, w.hyper, cfg);
    benchmark::DoNotOptimize(s.loadings.data());
  }
}

void BM_ObjectiveSerial(benchmark::State& state) {
  const auto w = make_workload(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::objective_serial(w.data, w.start, w.hyper));
}

void BM_ObjectiveParallel(benchmark::State& state) {
  const auto w = make_workload(state.range(0));
  const int threads = static_cast<int>(state.range(1));
  for (auto _ : state)
    benchmark::DoNotOptimize(kernels::objective_parallel(w.data, w.start, w.hyper, threads));
}

void serial_args(benchmark::internal::Benchmark* b) {
  for (long n : {500, 5000}) b->Args({n, 1});
  b->Unit(benchmark::kMillisecond);
}

void parallel_args(benchmark::internal::Benchmark* b) {
  for (long n : {500, 5000})
    for (long t : {1, 2, 4, 8}) b->Args({n, t});
  b->Unit(benchmark::kMillisecond)->UseRealTime();
}

}  // namespace

BENCHMARK(BM_ThetaSerial)->Apply(serial_args);
BENCHMARK(BM_ThetaParallel)->Apply(parallel_args);
BENCHMARK(BM_ItemSerial)->Apply(serial_args);
BENCHMARK(BM_ItemParallel)->Apply(parallel_args);
BENCHMARK(BM_ObjectiveSerial)->Apply(serial_args);
BENCHMARK(BM_ObjectiveParallel)->Apply(parallel_args);
BENCHMARK_MAIN();
