#include <benchmark/benchmark.h>

#include "carleman/bench.hpp"
#include "carleman/lifting.hpp"
#include "carleman/sim.hpp"

using namespace carleman;

namespace {

void bm_assemble_vdp(benchmark::State& state) {
  const auto bench = benchmark_vdp(0.5);
  const int order = static_cast<int>(state.range(0));
  for (auto _ : state) {
    FiniteSection section(bench.field, order);
    benchmark::DoNotOptimize(section.matrix().data());
  }
}
BENCHMARK(bm_assemble_vdp)->Arg(5)->Arg(10)->Arg(20);

void bm_build_block_vdp(benchmark::State& state) {
  const auto bench = benchmark_vdp(0.5);
  const int k = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto block = build_block(*bench.field, k, k, 0.0);
    benchmark::DoNotOptimize(block.entries.data());
  }
}
BENCHMARK(bm_build_block_vdp)->Arg(4)->Arg(12)->Arg(24);

void bm_integrate_section_1d(benchmark::State& state) {
  const auto bench = benchmark_1d(-1);
  const int order = static_cast<int>(state.range(0));
  FiniteSection section(bench.field, order);
  Eigen::VectorXd x0(1);
  x0[0] = 0.4;
  for (auto _ : state) {
    const auto traj = integrate_section(section, x0, 0.0, 1.0, 1e-3);
    benchmark::DoNotOptimize(traj.states.back().data());
  }
}
BENCHMARK(bm_integrate_section_1d)->Arg(10)->Arg(50)->Arg(100);

void bm_sweep_cell_vdp(benchmark::State& state) {
  const auto bench = benchmark_vdp(0.5);
  for (auto _ : state) {
    const auto grid = sweep_x0_v0(bench, {0.5}, {0.0}, static_cast<int>(state.range(0)),
                                  0.1, 1e-3);
    benchmark::DoNotOptimize(grid.values(0, 0));
  }
}
BENCHMARK(bm_sweep_cell_vdp)->Arg(5)->Arg(10)->Arg(20);

void bm_oracle_1d(benchmark::State& state) {
  for (auto _ : state) {
    double x = oracle_1d(-1, 0.5, 5.0);
    benchmark::DoNotOptimize(x);
  }
}
BENCHMARK(bm_oracle_1d);

}  // namespace

BENCHMARK_MAIN();
