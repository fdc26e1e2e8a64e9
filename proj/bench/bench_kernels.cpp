// Serial vs OpenMP kernels on the converged disc solution. The argument is
// the mesh size in units of 1e-3.

#include <benchmark/benchmark.h>

#include <map>
#include <memory>

#include "cmc/fields.hpp"
#include "cmc/pfunction.hpp"
#include "cmc/solver.hpp"

using namespace cmc;

namespace {

const GraphSolution& disc_solution(double h) {
  static std::map<double, GraphSolution> cache;
  auto it = cache.find(h);
  if (it == cache.end()) {
    auto mesh = std::make_shared<const TriMesh>(triangulate(build_domain({DomainKind::disc, {1.0}}), h));
    it = cache.emplace(h, continuation(mesh, 1.0, uniform_schedule(11)).steps.back()).first;
  }
  return it->second;
}

const GraphSolution& setup(benchmark::State& state) {
  const GraphSolution& s = disc_solution(state.range(0) * 1e-3);
  state.counters["nodes"] = static_cast<double>(s.mesh->num_nodes());
  return s;
}

void BM_ElementContributionsSerial(benchmark::State& state) {
  const GraphSolution& s = setup(state);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::element_contributions_serial(*s.mesh, s.values, s.t, s.H));
}

void BM_ElementContributionsParallel(benchmark::State& state) {
  const GraphSolution& s = setup(state);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::element_contributions_parallel(*s.mesh, s.values, s.t, s.H));
}

void BM_AssembleSerial(benchmark::State& state) {
  const GraphSolution& s = setup(state);
  for (auto _ : state) benchmark::DoNotOptimize(assemble(*s.mesh, s.values, s.t, s.H, Exec::serial));
}

void BM_AssembleParallel(benchmark::State& state) {
  const GraphSolution& s = setup(state);
  for (auto _ : state) benchmark::DoNotOptimize(assemble(*s.mesh, s.values, s.t, s.H, Exec::parallel));
}

void BM_ElementGradientsSerial(benchmark::State& state) {
  const GraphSolution& s = setup(state);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::element_gradients_serial(*s.mesh, s.values));
}

void BM_ElementGradientsParallel(benchmark::State& state) {
  const GraphSolution& s = setup(state);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::element_gradients_parallel(*s.mesh, s.values));
}

void BM_QuadraticFitsSerial(benchmark::State& state) {
  const GraphSolution& s = setup(state);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::quadratic_fits_serial(*s.mesh, s.values));
}

void BM_QuadraticFitsParallel(benchmark::State& state) {
  const GraphSolution& s = setup(state);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::quadratic_fits_parallel(*s.mesh, s.values));
}

void BM_PhiSerial(benchmark::State& state) {
  const GraphSolution& s = setup(state);
  for (auto _ : state) benchmark::DoNotOptimize(phi_field(s, 1.0, Exec::serial));
}

void BM_PhiParallel(benchmark::State& state) {
  const GraphSolution& s = setup(state);
  for (auto _ : state) benchmark::DoNotOptimize(phi_field(s, 1.0, Exec::parallel));
}

}  // namespace

#define MESH_SIZES Arg(50)->Arg(25)->Arg(12)->Unit(benchmark::kMicrosecond)
BENCHMARK(BM_ElementContributionsSerial)->MESH_SIZES;
BENCHMARK(BM_ElementContributionsParallel)->MESH_SIZES;
BENCHMARK(BM_AssembleSerial)->MESH_SIZES;
BENCHMARK(BM_AssembleParallel)->MESH_SIZES;
BENCHMARK(BM_ElementGradientsSerial)->MESH_SIZES;
BENCHMARK(BM_ElementGradientsParallel)->MESH_SIZES;
BENCHMARK(BM_QuadraticFitsSerial)->MESH_SIZES;
BENCHMARK(BM_QuadraticFitsParallel)->MESH_SIZES;
BENCHMARK(BM_PhiSerial)->MESH_SIZES;
BENCHMARK(BM_PhiParallel)->MESH_SIZES;

BENCHMARK_MAIN();
