// Reference loops vs OpenMP kernels, and serial vs parallel flow and binning.
// Run with OMP_NUM_THREADS to vary the thread count.

#include <benchmark/benchmark.h>

#include <vector>

#include "tactile/flow.hpp"
#include "tactile/kernels.hpp"
#include "tactile/labeling.hpp"
#include "tactile/render.hpp"
#include "tactile/rng.hpp"

using namespace tactile;

namespace {

struct Layer {
  std::size_t rows, in, out;
  std::vector<double> x, w, b, y, dy, dw, db, dx;

  explicit Layer(const benchmark::State& state)
      : rows(state.range(0)), in(state.range(1)), out(state.range(2)), x(rows * in), w(out * in), b(out),
        y(rows * out), dy(rows * out), dw(out * in), db(out), dx(rows * in) {
    Rng rng(7);
    for (auto* v : {&x, &w, &b, &dy})
      for (auto& e : *v) e = rng.uniform(-1, 1);
  }

  void count(benchmark::State& state) const {
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(rows * in * out));
  }
};

void layer_shapes(benchmark::internal::Benchmark* b) {
  b->Args({16, 64, 48})->Args({400, 128, 96})->Args({400, 800, 600});
}

void BM_affine_reference(benchmark::State& state) {
  Layer l(state);
  for (auto _ : state) {
    reference::affine_forward(l.x, l.rows, l.in, l.w, l.b, l.out, l.y);
    benchmark::DoNotOptimize(l.y.data());
  }
  l.count(state);
}
BENCHMARK(BM_affine_reference)->Apply(layer_shapes);

void BM_affine_serial(benchmark::State& state) {
  Layer l(state);
  for (auto _ : state) {
    kernels::affine_forward(l.x, l.rows, l.in, l.w, l.b, l.out, l.y, false);
    benchmark::DoNotOptimize(l.y.data());
  }
  l.count(state);
}
BENCHMARK(BM_affine_serial)->Apply(layer_shapes);

void BM_affine_parallel(benchmark::State& state) {
  Layer l(state);
  for (auto _ : state) {
    kernels::affine_forward(l.x, l.rows, l.in, l.w, l.b, l.out, l.y, true);
    benchmark::DoNotOptimize(l.y.data());
  }
  l.count(state);
}
BENCHMARK(BM_affine_parallel)->Apply(layer_shapes)->UseRealTime();

void BM_backward_reference(benchmark::State& state) {
  Layer l(state);
  for (auto _ : state) {
    reference::weight_gradient(l.dy, l.x, l.rows, l.in, l.out, l.dw, l.db);
    reference::input_gradient(l.dy, l.w, l.rows, l.in, l.out, l.dx);
    benchmark::DoNotOptimize(l.dx.data());
  }
  l.count(state);
}
BENCHMARK(BM_backward_reference)->Apply(layer_shapes);

void BM_backward_parallel(benchmark::State& state) {
  Layer l(state);
  for (auto _ : state) {
    kernels::weight_gradient(l.dy, l.x, l.rows, l.in, l.out, l.dw, l.db, true);
    kernels::input_gradient(l.dy, l.w, l.rows, l.in, l.out, l.dx, true);
    benchmark::DoNotOptimize(l.dx.data());
  }
  l.count(state);
}
BENCHMARK(BM_backward_parallel)->Apply(layer_shapes)->UseRealTime();

void BM_dense_flow(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  auto scene = ParticleScene::random(side, side, side * side / 18, 2.0, 6.0, 11);
  scene.displacement = [](double, double) { return Vec2{1.5, -0.75}; };
  const auto [ref, cur] = render_scene(scene);
  DisConfig cfg;
  cfg.parallel = state.range(1) != 0;
  for (auto _ : state) benchmark::DoNotOptimize(dense_flow(ref, cur, cfg));
  state.SetItemsProcessed(state.iterations() * side * side);
}
BENCHMARK(BM_dense_flow)->ArgsProduct({{128, 400}, {0, 1}})->ArgNames({"side", "parallel"})->UseRealTime();

void BM_binning(benchmark::State& state) {
  const auto mesh = SurfaceMesh::regular(Extent{}, 0.5);
  const BinGrid grid(Extent{}, 4, 4);
  std::vector<NodalForceField> fields;
  for (int i = 0; i < 64; ++i)
    fields.push_back(synth_indentation(mesh, i, {4.0 + 0.35 * i, 16.0, 0.4 + 0.025 * i}, ContactModel{}));
  const bool batch = state.range(0) != 0;
  for (auto _ : state) {
    if (batch) {
      benchmark::DoNotOptimize(bin_forces_batch(fields, mesh, grid));
    } else {
      for (const auto& f : fields) benchmark::DoNotOptimize(bin_forces(f, mesh, grid));
    }
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(fields.size()));
}
BENCHMARK(BM_binning)->Arg(0)->Arg(1)->ArgName("batch")->UseRealTime();

}  // namespace

BENCHMARK_MAIN();
