// Serial reference vs OpenMP for the batch kernels.

#include "kat/batch.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace kat;

namespace {

Scene slot_scene() {
  WallSpec w;
  w.center = Vec3::Zero();
  w.half_extents = Vec3(0.1, 3.0, 3.0);
  w.hole_half_extents = Eigen::Vector2d(0.6, 0.26);
  w.tilt = 0.87;
  return Scene(Aabb{Vec3(-3, -2, -2), Vec3(3, 2, 2)}, wall_with_hole(w),
               Configuration(Vec3(-2.3, 0, 0), Quat::Identity()), Configuration(Vec3(2.3, 0, 0), Quat::Identity()));
}

std::vector<Configuration> poses(std::size_t n) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Configuration> out;
  for (std::size_t i = 0; i < n; ++i) out.emplace_back(Vec3(u(rng), u(rng), u(rng)), random_quaternion(rng));
  return out;
}

Exec exec_of(const benchmark::State& state) { return state.range(1) ? Exec::parallel : Exec::serial; }

void BM_CollisionFlags(benchmark::State& state) {
  const Scene scene = slot_scene();
  const auto configs = poses(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(collision_flags(configs, scene, RobotBody{}, exec_of(state)));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_LocalMargins(benchmark::State& state) {
  const Scene scene = slot_scene();
  const auto configs = poses(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(local_margins(configs, scene, RobotBody{}, Vec3::Zero(), 1.5, exec_of(state)));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_DiskGridOptimum(benchmark::State& state) {
  const Scene scene = slot_scene();
  const Configuration c(Vec3::Zero(), Quat(Eigen::AngleAxisd(0.87, Vec3::UnitX())));
  const double pitch = 1.0 / static_cast<double>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(disk_grid_optimum(c, Vec3::UnitX(), 0.65, pitch, scene, RobotBody{}, 1.5, exec_of(state)));
  }
}

}  // namespace

BENCHMARK(BM_CollisionFlags)->ArgsProduct({{1000, 100000}, {0, 1}})->ArgNames({"n", "omp"})->UseRealTime();
BENCHMARK(BM_LocalMargins)->ArgsProduct({{1000, 100000}, {0, 1}})->ArgNames({"n", "omp"})->UseRealTime();
BENCHMARK(BM_DiskGridOptimum)->ArgsProduct({{100, 200}, {0, 1}})->ArgNames({"per_m", "omp"})->UseRealTime();

BENCHMARK_MAIN();
