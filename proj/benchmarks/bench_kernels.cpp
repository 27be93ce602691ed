#include <benchmark/benchmark.h>

#include <random>

#include "graspkit/kdtree.hpp"
#include "graspkit/metrics.hpp"
#include "graspkit/mise.hpp"
#include "graspkit/scene.hpp"
#include "graspkit/shapes.hpp"
#include "graspkit/tsdf.hpp"

using namespace graspkit;

namespace {

std::vector<Vec3> random_points(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  std::vector<Vec3> pts;
  pts.reserve(n);
  for (std::size_t i = 0; i < n; ++i) pts.emplace_back(u(rng), u(rng), u(rng));
  return pts;
}

void KdTreeNearest(benchmark::State& state) {
  const auto pts = random_points(static_cast<std::size_t>(state.range(0)), 1);
  const KdTree3 tree(pts);
  const auto queries = random_points(1024, 2);
  std::size_t q = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(tree.nearest(queries[q++ & 1023]));
  }
}
BENCHMARK(KdTreeNearest)->Arg(1000)->Arg(10000)->Arg(100000);

void RenderDepth(benchmark::State& state) {
  const TriMesh cup = generate_object(Category::Cup, default_params(Category::Cup), 0);
  SimilarityPose pose;
  pose.translation = Vec3(-0.45, 0.5, 0.25);
  const Frame cam = camera_frame(Vec3(-1.15, 0.5, 0.588), 0.0, deg_to_rad(30.0));
  CameraIntrinsics intr;
  intr.width = static_cast<int>(state.range(0));
  intr.height = intr.width * 3 / 4;
  intr.cx = intr.width / 2.0;
  intr.cy = intr.height / 2.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(render_depth(cup, pose, cam, intr));
  }
}
BENCHMARK(RenderDepth)->Arg(320)->Arg(640)->Unit(benchmark::kMillisecond);

void VoxelizeTsdf(benchmark::State& state) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> ua(0, 2 * kPi);
  std::uniform_real_distribution<double> uz(-0.3, 0.3);
  PointCloud cloud;
  for (int i = 0; i < 20000; ++i) {
    const double a = ua(rng);
    cloud.points.emplace_back(0.28 * std::cos(a), 0.28 * std::sin(a), uz(rng));
  }
  const Vec3 cam(4.0, 0.0, 1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(voxelize_tsdf(cloud, cam));
  }
}
BENCHMARK(VoxelizeTsdf)->Unit(benchmark::kMillisecond);

void MiseExtract(benchmark::State& state) {
  OccupancyGrid g;
  g.resolution = 64;
  g.origin = Vec3(-0.5, -0.5, -0.5);
  g.voxel_size = 1.0 / 64;
  g.values.resize(64 * 64 * 64);
  for (int k = 0; k < 64; ++k) {
    for (int j = 0; j < 64; ++j) {
      for (int i = 0; i < 64; ++i) {
        const double d = (g.center(i, j, k)).norm() - 0.3;
        g.value(i, j, k) = static_cast<float>(std::clamp(0.5 - d * 32.0, 0.0, 1.0));
      }
    }
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(extract_mesh_mise(g, 0.5, 32, static_cast<int>(state.range(0))));
  }
}
BENCHMARK(MiseExtract)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

void ChamferMetrics(benchmark::State& state) {
  const TriMesh cup = generate_object(Category::Cup, default_params(Category::Cup), 0);
  const auto a = sample_surface(cup, static_cast<std::size_t>(state.range(0)), 1);
  const auto b = sample_surface(cup, static_cast<std::size_t>(state.range(0)), 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(shape_metrics(a, b));
  }
}
BENCHMARK(ChamferMetrics)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
