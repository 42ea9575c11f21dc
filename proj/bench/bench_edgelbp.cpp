#include <random>

#include <benchmark/benchmark.h>

#include "edgelbp/datagen.hpp"
#include "edgelbp/descriptor.hpp"
#include "edgelbp/similarity.hpp"

using namespace edgelbp;

namespace {

const SurfaceMesh& dotted_sphere() {
  static const SurfaceMesh mesh =
      apply_pattern(generate_base_mesh({ShapeKind::sphere, 10000, 2.0}, 0), PatternSpec{PatternKind::dots, 0.4},
                    Mapping::spherical);
  return mesh;
}

EdgeLbpParams dataset_params() {
  EdgeLbpParams p;
  p.r_max = kDefaultDatasetRMax;
  return p;
}

void BM_VertexCodesSerial(benchmark::State& state) {
  const auto& mesh = dotted_sphere();
  const auto field = compute_scalar_field(mesh, HMode::cielab_l);
  const auto params = dataset_params();
  for (auto _ : state) benchmark::DoNotOptimize(compute_vertex_codes_serial(mesh, field, params));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(mesh.vertex_count()));
}
BENCHMARK(BM_VertexCodesSerial)->Unit(benchmark::kMillisecond);

void BM_VertexCodesParallel(benchmark::State& state) {
  const auto& mesh = dotted_sphere();
  const auto field = compute_scalar_field(mesh, HMode::cielab_l);
  const auto params = dataset_params();
  for (auto _ : state)
    benchmark::DoNotOptimize(compute_vertex_codes(mesh, field, params, static_cast<int>(state.range(0))));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(mesh.vertex_count()));
}
BENCHMARK(BM_VertexCodesParallel)->Arg(1)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

// Per-vertex cost as the outer radius grows.
void BM_RingExtraction(benchmark::State& state) {
  const auto& mesh = dotted_sphere();
  const auto field = compute_scalar_field(mesh, HMode::cielab_l);
  RingExtractor extractor(mesh, field);
  const auto radii = radii_schedule(static_cast<double>(state.range(0)) / 100.0, 5);
  Index v = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(extractor.extract(v, radii, 15));
    v = (v + 7919) % static_cast<Index>(mesh.vertex_count());
  }
}
BENCHMARK(BM_RingExtraction)->Arg(5)->Arg(10)->Arg(20)->Arg(40);

std::vector<Signature> random_signatures(std::size_t n) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Signature> items;
  for (std::size_t i = 0; i < n; ++i) {
    HistogramMatrix m(5, 16);
    for (std::size_t r = 0; r < 5; ++r) {
      double sum = 0.0;
      for (std::size_t c = 0; c < 16; ++c) sum += m(r, c) = u(rng);
      for (std::size_t c = 0; c < 16; ++c) m(r, c) /= sum;
    }
    items.push_back({std::to_string(i), "k", std::move(m)});
  }
  return items;
}

void BM_DistanceMatrixSerial(benchmark::State& state) {
  const auto items = random_signatures(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(distance_matrix_serial(items, Metric::bhattacharyya));
}
BENCHMARK(BM_DistanceMatrixSerial)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);

void BM_DistanceMatrixParallel(benchmark::State& state) {
  const auto items = random_signatures(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(distance_matrix(items, Metric::bhattacharyya, 0));
}
BENCHMARK(BM_DistanceMatrixParallel)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
