#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

#include "segreg/segreg.hpp"

using namespace segreg;

namespace {

Grid cube(int n) { return Grid({n, n, n}, {1.0, 1.0, 1.0}); }

Volume ellipsoid(const Grid& g, const Vec3& shift) {
  Volume m(g, VolumeKind::binary_mask);
  const Vec3 c = g.center() + shift;
  const double r = 0.3 * g.dims[0];
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Vec3 d = g.world(i) - c;
    const double q = d[0] * d[0] / (r * r) + d[1] * d[1] / (0.8 * r * 0.8 * r) + d[2] * d[2] / (0.7 * r * 0.7 * r);
    m.values[i] = q <= 1.0 ? 1.0 : 0.0;
  }
  return m;
}

DisplacementField smooth_field(const Grid& g) {
  DisplacementField f(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Vec3 x = g.world(i);
    f.vectors[i] = {1.5 * std::sin(x[1] / 9.0), -std::cos(x[2] / 7.0), 0.8 * std::sin(x[0] / 11.0)};
  }
  return f;
}

void BM_Warp(benchmark::State& state) {
  const Grid g = cube(static_cast<int>(state.range(0)));
  const Volume m = ellipsoid(g, {0, 0, 0});
  const DisplacementField f = smooth_field(g);
  for (auto _ : state) benchmark::DoNotOptimize(warp(m, f));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(g.size()));
}
BENCHMARK(BM_Warp)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_WarpGrad(benchmark::State& state) {
  const Grid g = cube(static_cast<int>(state.range(0)));
  const Volume m = ellipsoid(g, {0, 0, 0});
  const DisplacementField f = smooth_field(g);
  const std::vector<double> up(g.size(), 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(warp_grad(m, f, up));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(g.size()));
}
BENCHMARK(BM_WarpGrad)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_SignedDistance(benchmark::State& state) {
  const Grid g = cube(static_cast<int>(state.range(0)));
  const Volume m = ellipsoid(g, {0, 0, 0});
  for (auto _ : state) benchmark::DoNotOptimize(signed_distance_map(m));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(g.size()));
}
BENCHMARK(BM_SignedDistance)->Arg(32)->Arg(64)->Arg(96)->Unit(benchmark::kMillisecond);

void BM_GaussianSmooth(benchmark::State& state) {
  const Grid g = cube(64);
  const Volume m = ellipsoid(g, {0, 0, 0});
  const double sigma = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(gaussian_smooth(m, sigma));
}
BENCHMARK(BM_GaussianSmooth)->Arg(1)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_ObjectiveWithGrad(benchmark::State& state) {
  const Grid g = cube(static_cast<int>(state.range(0)));
  const Volume moving = ellipsoid(g, {2.0, -1.0, 1.0});
  const Volume fixed = ellipsoid(g, {0, 0, 0});
  const RegistrationObjective obj(moving, fixed, signed_distance_map(moving), signed_distance_map(fixed),
                                  weights_for(RegistrationMode::mix), SigmaSchedule{});
  const DisplacementField f = smooth_field(g);
  for (auto _ : state) benchmark::DoNotOptimize(obj.evaluate_with_grad(f));
}
BENCHMARK(BM_ObjectiveWithGrad)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_ComposePyramid(benchmark::State& state) {
  const Grid g = cube(64);
  DdfPyramid p = DdfPyramid::zeros(g, 5);
  for (auto& l : p.levels) l = smooth_field(l.grid);
  for (auto _ : state) benchmark::DoNotOptimize(compose_pyramid(p));
}
BENCHMARK(BM_ComposePyramid)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
