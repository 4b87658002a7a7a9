// Serial reference vs fused kernels (serial and OpenMP) on both examples.
// Run with OMP_NUM_THREADS set to compare thread counts.

#include <benchmark/benchmark.h>

#include <cmath>
#include <string>

#include "smtraj/gradients.hpp"
#include "smtraj/reference.hpp"

using namespace smtraj;

namespace {

struct Workload {
  ProblemSpec spec;
  TimeGrid grid{2, 1.0};
  DerivativeGrid z;
};

Workload make_workload(const std::string& file, int nodes) {
  Workload w;
  w.spec = load_problem(std::string(SMTRAJ_PROBLEMS_DIR) + "/" + file);
  w.grid = TimeGrid(nodes, w.spec.horizon);
  w.z = DerivativeGrid::zeros(nodes, w.spec.n);
  for (int k = 0; k < nodes; ++k)
    for (int j = 0; j < w.spec.n; ++j) w.z.values(k, j) = std::sin((j + 1) * 3.0 * w.grid.node(k) + j);
  return w;
}

const char* problem_file(int which) { return which == 1 ? "example1.json" : "example2.json"; }

void BM_reference_gradient(benchmark::State& state) {
  const Workload w = make_workload(problem_file(static_cast<int>(state.range(0))), static_cast<int>(state.range(1)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(reference::evaluate(w.spec, w.grid, w.z, w.spec.initial_params));
    benchmark::DoNotOptimize(reference::gradient(w.spec, w.grid, w.z, w.spec.initial_params));
  }
}

template <Exec E>
void BM_fused_gradient(benchmark::State& state) {
  const Workload w = make_workload(problem_file(static_cast<int>(state.range(0))), static_cast<int>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_with_gradient(w.spec, w.grid, w.z, w.spec.initial_params, E));
}

template <Exec E>
void BM_value_only(benchmark::State& state) {
  const Workload w = make_workload(problem_file(static_cast<int>(state.range(0))), static_cast<int>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(evaluate(w.spec, w.grid, w.z, w.spec.initial_params, E));
}

void sizes(benchmark::internal::Benchmark* b) {
  b->ArgNames({"example", "nodes"});
  for (int example : {1, 2})
    for (int nodes : {501, 2001, 8001}) b->Args({example, nodes});
  b->Unit(benchmark::kMicrosecond);
}

}  // namespace

BENCHMARK(BM_reference_gradient)->Apply(sizes);
BENCHMARK(BM_fused_gradient<Exec::serial>)->Apply(sizes);
BENCHMARK(BM_fused_gradient<Exec::parallel>)->Apply(sizes);
BENCHMARK(BM_value_only<Exec::serial>)->Apply(sizes);
BENCHMARK(BM_value_only<Exec::parallel>)->Apply(sizes);

BENCHMARK_MAIN();
