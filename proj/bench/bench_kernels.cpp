// Serial reference kernels against their OpenMP counterparts. Run with
// OMP_NUM_THREADS set to the worker count of interest.

#include <random>

#include <benchmark/benchmark.h>

#include "privcap/privileged.hpp"
#include "privcap/reference.hpp"

using namespace privcap;

namespace {

Graph random_graph(std::size_t n, double density, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(density);
  Graph g(n);
  for (Vertex u = 0; u < n; ++u)
    for (Vertex v = u + 1; v < n; ++v)
      if (coin(rng)) g.add_edge(u, v);
  return g;
}

// r = 12, s = 6: 924 vertices
constexpr unsigned kR = 12;
constexpr unsigned kS = 6;

const Graph& labelled() {
  static const Graph g = build_graph(kR, kS, {5}, 1);
  return g;
}

const RepresentationCertificate& certificate() {
  static const auto cert = RepresentationCertificate::from_labeled_graph(labelled(), 5, kR, kS);
  return cert;
}

// Diagonal tuples over an edgeless graph, so every pair gets scanned.
const TupleList& diagonal() {
  static const TupleList tuples = [] {
    TupleList t(2);
    for (Vertex v = 0; v < 600; ++v) t.push_back(std::vector<Vertex>{v, v});
    return t;
  }();
  return tuples;
}

const Graph& sparse() {
  static const Graph g = Graph::edgeless(600);
  return g;
}

void BM_StrongProduct_Reference(benchmark::State& state) {
  const auto g = random_graph(static_cast<std::size_t>(state.range(0)), 0.3, 1);
  for (auto _ : state) benchmark::DoNotOptimize(reference::strong_product(g, g));
}
void BM_StrongProduct_Parallel(benchmark::State& state) {
  const auto g = random_graph(static_cast<std::size_t>(state.range(0)), 0.3, 1);
  for (auto _ : state) benchmark::DoNotOptimize(strong_product(g, g));
}

void BM_BuildGraph_Reference(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(reference::build_graph(kR, kS, {3, 5}, 1));
}
void BM_BuildGraph_Parallel(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(build_graph(kR, kS, {3, 5}, 1));
}

void BM_Certificate_Reference(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(reference::verify_certificate(labelled(), certificate()));
}
void BM_Certificate_Parallel(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(verify_certificate(labelled(), certificate()));
}

void BM_PowerIndependence_Reference(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(reference::check_independent_in_power(sparse(), 2, diagonal()));
}
void BM_PowerIndependence_Parallel(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(check_independent_in_power(sparse(), 2, diagonal()));
}

void BM_Coloring_Reference(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(reference::build_coloring(kR, kS, {5, 7}));
}
void BM_Coloring_Parallel(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(build_coloring(kR, kS, {5, 7}));
}

}  // namespace

BENCHMARK(BM_StrongProduct_Reference)->Arg(24)->Arg(48)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_StrongProduct_Parallel)->Arg(24)->Arg(48)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BuildGraph_Reference)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BuildGraph_Parallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Certificate_Reference)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Certificate_Parallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PowerIndependence_Reference)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PowerIndependence_Parallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Coloring_Reference)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Coloring_Parallel)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
