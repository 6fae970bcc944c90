#include <benchmark/benchmark.h>

#include <vector>

#include "maeig/delaunay.hpp"
#include "maeig/eigensolver.hpp"
#include "maeig/recovery.hpp"

using namespace maeig;

namespace {

struct Setup {
  TriMesh mesh;
  PoissonSystem system;
  std::vector<double> u0;
};

const Setup& disk(int inv_h) {
  static std::vector<std::pair<int, Setup>> cache;
  for (const auto& [k, s] : cache) {
    if (k == inv_h) return s;
  }
  Setup s;
  s.mesh = generate_mesh(DomainSpec::make(DomainKind::UnitDisk), 1.0 / inv_h, 0);
  s.system = assemble_system(s.mesh);
  s.u0 = initial_guess(s.mesh, s.system, 0.5);
  cache.emplace_back(inv_h, std::move(s));
  return cache.back().second;
}

}  // namespace

static void BM_Delaunay(benchmark::State& state) {
  const TriMesh& mesh = disk(static_cast<int>(state.range(0))).mesh;
  for (auto _ : state) benchmark::DoNotOptimize(delaunay_triangulate(mesh.vertices));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(mesh.num_vertices()));
}
BENCHMARK(BM_Delaunay)->Arg(40)->Arg(80)->Unit(benchmark::kMillisecond);

static void BM_GenerateMesh(benchmark::State& state) {
  const double h = 1.0 / static_cast<double>(state.range(0));
  const DomainSpec dom = DomainSpec::make(DomainKind::UnitDisk);
  for (auto _ : state) benchmark::DoNotOptimize(generate_mesh(dom, h, 0));
}
BENCHMARK(BM_GenerateMesh)->Arg(20)->Arg(40)->Unit(benchmark::kMillisecond);

static void BM_AssembleAndFactor(benchmark::State& state) {
  const TriMesh& mesh = disk(static_cast<int>(state.range(0))).mesh;
  for (auto _ : state) benchmark::DoNotOptimize(assemble_system(mesh));
}
BENCHMARK(BM_AssembleAndFactor)->Arg(40)->Arg(80)->Unit(benchmark::kMillisecond);

static void BM_PoissonSolve(benchmark::State& state) {
  const Setup& s = disk(static_cast<int>(state.range(0)));
  const std::vector<double> source(s.mesh.num_vertices(), 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(solve_poisson(s.system, source));
}
BENCHMARK(BM_PoissonSolve)->Arg(40)->Arg(80)->Unit(benchmark::kMicrosecond);

static void BM_RecoverHessian(benchmark::State& state) {
  const Setup& s = disk(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(recover_hessian(s.mesh, s.u0));
}
BENCHMARK(BM_RecoverHessian)->Arg(40)->Arg(80)->Unit(benchmark::kMicrosecond);

static void BM_InnerSolve(benchmark::State& state) {
  const Setup& s = disk(static_cast<int>(state.range(0)));
  SolverConfig cfg;
  cfg.h = 1.0 / static_cast<double>(state.range(0));
  const double lambda = 7.49;
  for (auto _ : state) benchmark::DoNotOptimize(inner_solve(s.mesh, s.system, s.u0, lambda, cfg, 1e-3));
}
BENCHMARK(BM_InnerSolve)->Arg(40)->Unit(benchmark::kMillisecond);

static void BM_SolveEigenproblem(benchmark::State& state) {
  const Setup& s = disk(40);
  SolverConfig cfg;
  cfg.h = 1.0 / 40.0;
  for (auto _ : state) benchmark::DoNotOptimize(solve_eigenproblem(cfg, s.mesh, s.system));
}
BENCHMARK(BM_SolveEigenproblem)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
