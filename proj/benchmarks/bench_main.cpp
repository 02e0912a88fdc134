#include <benchmark/benchmark.h>

#include <vector>

#include "rlab/forms.hpp"
#include "rlab/generators.hpp"
#include "rlab/green.hpp"
#include "rlab/metric.hpp"
#include "rlab/walk.hpp"

using namespace rlab;

namespace {

Region interior(const WeightedGraph& g) {
  auto b = g.boundary();
  std::vector<bool> out(g.vertex_count(), false);
  for (Vertex v : b) out[v] = true;
  std::vector<Vertex> m;
  for (Vertex v = 0; v < g.vertex_count(); ++v)
    if (!out[v]) m.push_back(v);
  return Region(m);
}

}  // namespace

static void BM_FormApply(benchmark::State& state) {
  auto g = gen_gasket(static_cast<int>(state.range(0))).graph;
  FormOperator op(g, 2);
  std::vector<double> f(g.vertex_count());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = double(i % 7) - 3.0;
  for (auto _ : state) {
    auto r = op.apply(f);
    benchmark::DoNotOptimize(r.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(g.vertex_count()));
}
BENCHMARK(BM_FormApply)->DenseRange(4, 8, 2);

static void BM_NestedSolve(benchmark::State& state) {
  auto g = gen_lattice(2, static_cast<int>(state.range(0))).graph;
  LaplacianSolver solver(g);
  std::vector<double> b(g.vertex_count(), 0.0);
  b.front() = 1.0;
  b.back() = -1.0;
  for (auto _ : state) {
    auto u = solver.form_inverse(2, b);
    benchmark::DoNotOptimize(u.data());
  }
}
BENCHMARK(BM_NestedSolve)->Arg(17)->Arg(33)->Arg(65)->Arg(129);

static void BM_ConjugateGradient(benchmark::State& state) {
  auto g = gen_gasket(static_cast<int>(state.range(0))).graph;
  FormOperator op(g, 1);
  std::vector<double> b(g.vertex_count(), 0.0);
  b.front() = 1.0;
  b.back() = -1.0;
  for (auto _ : state) {
    auto w = solve_psd(op, b);
    benchmark::DoNotOptimize(w.solution.data());
  }
}
BENCHMARK(BM_ConjugateGradient)->DenseRange(3, 6);

static void BM_GreenRow(benchmark::State& state) {
  auto g = gen_gasket(static_cast<int>(state.range(0))).graph;
  auto a = interior(g);
  const Vertex x = a[a.size() / 2];
  for (auto _ : state) {
    auto row = green_row(g, a, 3, x);
    benchmark::DoNotOptimize(row.row.data());
  }
}
BENCHMARK(BM_GreenRow)->DenseRange(4, 7);

static void BM_RmTable(benchmark::State& state) {
  auto g = gen_gasket(static_cast<int>(state.range(0))).graph;
  for (auto _ : state) {
    auto t = rm_matrix(g, 1);
    benchmark::DoNotOptimize(t.at(0, 1));
  }
}
BENCHMARK(BM_RmTable)->DenseRange(3, 5)->Unit(benchmark::kMillisecond);

static void BM_HeatKernel(benchmark::State& state) {
  auto gen = gen_lattice(2, 129);
  const Vertex x = *gen.find({64, 64, 0});
  for (auto _ : state) {
    auto s = heat_kernel(gen.graph, x, static_cast<std::size_t>(state.range(0)));
    benchmark::DoNotOptimize(&s);
  }
}
BENCHMARK(BM_HeatKernel)->RangeMultiplier(4)->Range(16, 1024)->Unit(benchmark::kMillisecond);

static void BM_SimulateExit(benchmark::State& state) {
  auto g = gen_lattice(1, 201).graph;
  std::vector<Vertex> m;
  for (Vertex v = 80; v <= 120; ++v) m.push_back(v);
  Region a(m);
  for (auto _ : state) {
    auto s = simulate_exit(g, a, 100, static_cast<std::size_t>(state.range(0)), 42);
    benchmark::DoNotOptimize(&s);
  }
}
BENCHMARK(BM_SimulateExit)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
