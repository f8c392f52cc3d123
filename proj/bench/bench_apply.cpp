// Copyright 2026 The mlfeti Authors
// SPDX-License-Identifier: Apache-2.0

// Serial reference vs OpenMP kernels: hierarchy setup and one application of
// the multilevel BDDC preconditioner and of the FETI-DP saddle operator.

#include <benchmark/benchmark.h>

#include <memory>
#include <random>

#include "mlfeti/fem.hpp"
#include "mlfeti/fetidp.hpp"
#include "mlfeti/multilevel.hpp"
#include "mlfeti/preconditioners.hpp"

namespace {

using namespace mlfeti;

Execution mode(const benchmark::State& state) {
  return state.range(0) == 0 ? Execution::serial : Execution::parallel;
}

struct Fixture {
  fem::AssembledProblem problem;
  std::shared_ptr<const dd::MultilevelHierarchy> hierarchy;

  explicit Fixture(const std::vector<int>& ratios) {
    const auto geometry = dd::build_hierarchy(ratios);
    problem = fem::assemble_global(fem::StructuredGrid{geometry.n}, 1.0);
    hierarchy = std::make_shared<const dd::MultilevelHierarchy>(
        dd::build_multilevel(problem, geometry, dd::ConstraintRecipe::corners_edges));
  }
};

const Fixture& fixture() {
  static const Fixture f({3, 3, 3});
  return f;
}

Vector random_vector(Index n) {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Vector v(n);
  for (Index i = 0; i < n; ++i) v(i) = dist(gen);
  return v;
}

void BM_BuildHierarchy(benchmark::State& state) {
  const auto geometry = dd::build_hierarchy({3, 3, 3});
  const auto problem = fem::assemble_global(fem::StructuredGrid{geometry.n}, 1.0);
  for (auto _ : state) {
    auto h = dd::build_multilevel(problem, geometry, dd::ConstraintRecipe::corners_edges, mode(state));
    benchmark::DoNotOptimize(h.levels.size());
  }
}

void BM_BddcApply(benchmark::State& state) {
  const auto& f = fixture();
  const auto& level = f.hierarchy->fine();
  const BddcPreconditioner bddc(level, default_coarse_solver(f.hierarchy, mode(state)), mode(state));
  const Vector r = random_vector(level.gamma_size());
  for (auto _ : state) benchmark::DoNotOptimize(bddc.apply(r));
}

void BM_SchurApply(benchmark::State& state) {
  const auto& level = fixture().hierarchy->fine();
  const Vector x = random_vector(level.gamma_size());
  for (auto _ : state) benchmark::DoNotOptimize(dd::apply_assembled_schur(level, x, mode(state)));
}

void BM_SaddleApply(benchmark::State& state) {
  const auto& level = fixture().hierarchy->fine();
  const FetiDpSaddleSystem saddle(level, mode(state));
  const Vector x = random_vector(saddle.size());
  for (auto _ : state) benchmark::DoNotOptimize(saddle.apply(x));
}

}  // namespace

BENCHMARK(BM_BuildHierarchy)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BddcApply)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SchurApply)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SaddleApply)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
