#include <benchmark/benchmark.h>

#include <cmath>

#include "mpclo/mappings.h"
#include "mpclo/partition.h"

namespace {

using mpclo::Matrix;
using mpclo::ProblemData;
using mpclo::Vector;

ProblemData elliptope() {
  const double h = 1.0 / std::sqrt(2.0);
  ProblemData p;
  p.name = "elliptope";
  p.cone = mpclo::cones::ConeSpec::psd(3);
  p.A = Matrix{{1, 0, 0, 0, 0, 0}, {0, 0, 0, 1, 0, 0}, {0, 0, 0, 0, 0, 1}};
  p.b = {1, 1, 1};
  p.c = {0, 0, 0, 0, -h, 0};
  p.M = Matrix{{0, h, 0, 0, 0, 0}, {0, 0, -h, 0, 0, 0}};
  p.d = {1, 0, 0, 1, 0, 1};
  return p;
}

void BM_SolvePrimal(benchmark::State& state) {
  const ProblemData p = elliptope();
  const mpclo::SolverInstance inst = mpclo::assemble_primal(p, Vector{0.5, 0.4});
  for (auto _ : state) benchmark::DoNotOptimize(mpclo::solve(inst));
}
BENCHMARK(BM_SolvePrimal);

void BM_EvalPhiWithExtents(benchmark::State& state) {
  const ProblemData p = elliptope();
  for (auto _ : state) benchmark::DoNotOptimize(mpclo::eval_phi(p, Vector{0.5, 0.4}));
}
BENCHMARK(BM_EvalPhiWithExtents);

void BM_ClassifyGrid(benchmark::State& state) {
  const ProblemData p = elliptope();
  mpclo::GridSpec g;
  g.side = mpclo::Side::kDualThetaD;
  g.rectangle = {{-4, 4}, {-4, 4}};
  g.resolution = static_cast<std::size_t>(state.range(0));
  mpclo::PartitionOptions opt;
  opt.workers = 1;
  for (auto _ : state) benchmark::DoNotOptimize(mpclo::classify_grid(p, g, opt));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(g.cell_count()));
}
BENCHMARK(BM_ClassifyGrid)->Arg(5)->Arg(9)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
