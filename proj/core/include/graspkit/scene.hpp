#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "graspkit/mesh.hpp"

namespace graspkit {

// Single-view depth raster. Values are distances along the camera optical
// axis (z-depth) in meters; 0 means no return.
struct DepthImage {
  int width = 0, height = 0;
  std::vector<float> depth;  // row-major, width*height
  Frame sensor_pose;         // camera frame in robot base

  float at(int u, int v) const { return depth[static_cast<std::size_t>(v) * width + u]; }
  float& at(int u, int v) { return depth[static_cast<std::size_t>(v) * width + u]; }
};

struct SegmentationMask {
  int width = 0, height = 0;
  std::vector<std::uint8_t> values;  // row-major, 0/1

  std::uint8_t at(int u, int v) const { return values[static_cast<std::size_t>(v) * width + u]; }
  std::uint8_t& at(int u, int v) { return values[static_cast<std::size_t>(v) * width + u]; }
};

struct PointCloud {
  std::vector<Vec3> points;
  std::vector<Vec3> normals;  // optional; empty or points-sized
};

struct PixelCoords {
  std::vector<std::pair<int, int>> uv;
};

// Camera axes convention: +X image right, +Y image down, +Z optical axis.
// yaw rotates the forward axis in the base XY plane (0 = +X base),
// pitch > 0 tilts it downward.
Frame camera_frame(const Vec3& position, double yaw, double pitch);

struct RenderOptions {
  double depth_noise_sigma = 0.0;  // meters, zero-mean Gaussian on hits
  std::uint64_t noise_seed = 0;
};

// Renders z-depth of `mesh` posed by `object_pose` (object frame -> robot
// base) as seen from `camera`. Mask is 1 exactly where a ray hit the mesh.
// Deterministic, including the optional noise pass.
std::pair<DepthImage, SegmentationMask> render_depth(
    const TriMesh& mesh, const SimilarityPose& object_pose, const Frame& camera,
    const CameraIntrinsics& intr, const RenderOptions& opts = {});

// Pinhole back-projection of masked pixels with depth > 0 into the camera
// frame: ((u-cx)/fx*d, (v-cy)/fy*d, d). Throws EmptyForeground when no
// masked pixel carries depth. Also reports the source pixel of every point.
PointCloud backproject(const DepthImage& depth, const SegmentationMask& mask,
                       const CameraIntrinsics& intr,
                       PixelCoords* pixels = nullptr);

// Pinhole projection of a camera-frame point; null when behind the camera.
std::optional<std::pair<double, double>> project_point(const Vec3& p_cam,
                                                       const CameraIntrinsics& intr);

}  // namespace graspkit
