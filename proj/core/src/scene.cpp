#include "graspkit/scene.hpp"

#include <cmath>
#include <random>
#include <thread>

#include "graspkit/bvh.hpp"

namespace graspkit {

Frame camera_frame(const Vec3& position, double yaw, double pitch) {
  const Vec3 forward(std::cos(pitch) * std::cos(yaw),
                     std::cos(pitch) * std::sin(yaw), -std::sin(pitch));
  Vec3 right = forward.cross(Vec3::UnitZ());
  const double rn = right.norm();
  if (rn < 1e-9) throw InvalidParams("camera_frame: optical axis is vertical");
  right /= rn;
  const Vec3 down = forward.cross(right);
  Mat3 axes;
  axes.col(0) = right;
  axes.col(1) = down;
  axes.col(2) = forward;
  return Frame{position, Rotation3(axes)};
}

std::pair<DepthImage, SegmentationMask> render_depth(
    const TriMesh& mesh, const SimilarityPose& object_pose, const Frame& camera,
    const CameraIntrinsics& intr, const RenderOptions& opts) {
  intr.validate();
  if (mesh.vertices.empty() || mesh.triangles.empty()) {
    throw EmptyMesh("render_depth: empty mesh");
  }

  const TriMesh world = transformed(mesh, object_pose);
  const TriangleBvh bvh(world);

  DepthImage depth;
  depth.width = intr.width;
  depth.height = intr.height;
  depth.depth.assign(static_cast<std::size_t>(intr.width) * intr.height, 0.0f);
  depth.sensor_pose = camera;
  SegmentationMask mask;
  mask.width = intr.width;
  mask.height = intr.height;
  mask.values.assign(depth.depth.size(), 0);

  const Mat3 cam_axes = camera.axes.matrix();
  const Vec3 origin = camera.origin;

  // Rows are independent; partition them statically so the output does not
  // depend on scheduling.
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const unsigned n_workers = std::min<unsigned>(hw, 8);
  auto render_rows = [&](int v0, int v1) {
    for (int v = v0; v < v1; ++v) {
      for (int u = 0; u < intr.width; ++u) {
        // Direction with unit z in the camera frame, so t equals z-depth.
        const Vec3 dir_cam((u - intr.cx) / intr.fx, (v - intr.cy) / intr.fy, 1.0);
        const Vec3 dir = cam_axes * dir_cam;
        if (const auto hit = bvh.first_hit(origin, dir)) {
          depth.at(u, v) = static_cast<float>(hit->t);
          mask.at(u, v) = 1;
        }
      }
    }
  };
  if (n_workers <= 1 || intr.height < 64) {
    render_rows(0, intr.height);
  } else {
    std::vector<std::thread> workers;
    const int chunk = (intr.height + static_cast<int>(n_workers) - 1) / static_cast<int>(n_workers);
    for (unsigned w = 0; w < n_workers; ++w) {
      const int v0 = static_cast<int>(w) * chunk;
      const int v1 = std::min(intr.height, v0 + chunk);
      if (v0 < v1) workers.emplace_back(render_rows, v0, v1);
    }
    for (auto& t : workers) t.join();
  }

  if (opts.depth_noise_sigma > 0.0) {
    // Single deterministic pass in raster order.
    std::mt19937_64 rng(opts.noise_seed);
    std::normal_distribution<double> gauss(0.0, opts.depth_noise_sigma);
    for (std::size_t i = 0; i < depth.depth.size(); ++i) {
      if (mask.values[i]) {
        const double noisy = depth.depth[i] + gauss(rng);
        depth.depth[i] = static_cast<float>(std::max(1e-6, noisy));
      }
    }
  }
  return {std::move(depth), std::move(mask)};
}

PointCloud backproject(const DepthImage& depth, const SegmentationMask& mask,
                       const CameraIntrinsics& intr, PixelCoords* pixels) {
  if (depth.width != mask.width || depth.height != mask.height) {
    throw InvalidParams("backproject: depth/mask resolution mismatch");
  }
  intr.validate();
  PointCloud cloud;
  if (pixels) pixels->uv.clear();
  for (int v = 0; v < depth.height; ++v) {
    for (int u = 0; u < depth.width; ++u) {
      if (!mask.at(u, v)) continue;
      const double d = depth.at(u, v);
      if (d <= 0.0) continue;
      cloud.points.emplace_back(d * (u - intr.cx) / intr.fx,
                                d * (v - intr.cy) / intr.fy, d);
      if (pixels) pixels->uv.emplace_back(u, v);
    }
  }
  if (cloud.points.empty()) {
    throw EmptyForeground("backproject: no masked pixel with positive depth");
  }
  return cloud;
}

std::optional<std::pair<double, double>> project_point(const Vec3& p_cam,
                                                       const CameraIntrinsics& intr) {
  if (p_cam.z() <= 0.0) return std::nullopt;
  return std::make_pair(intr.fx * p_cam.x() / p_cam.z() + intr.cx,
                        intr.fy * p_cam.y() / p_cam.z() + intr.cy);
}

}  // namespace graspkit
