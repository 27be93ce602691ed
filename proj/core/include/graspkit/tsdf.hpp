#pragma once

#include <cstdint>
#include <vector>

#include "graspkit/scene.hpp"

namespace graspkit {

// Canonical-frame voxel lattice. Voxel centers sit at
// origin + (index + 0.5) * voxel_size; the default domain is the unit cube
// centered at the origin.
struct GridSpec {
  int resolution = 64;
  Vec3 origin = Vec3(-0.5, -0.5, -0.5);
  double voxel_size = 1.0 / 64.0;
  double truncation = 4.0 / 64.0;  // delta, >= voxel_size
  // Angular cone for surface evidence per voxel ray: half-angle =
  // max(cone_min, atan(cone_scale * voxel_size / camera_distance)).
  double cone_scale = 0.75;
  double cone_min = 0.0025;  // radians

  void validate() const;
  Vec3 center(int i, int j, int k) const {
    return origin + voxel_size * Vec3(i + 0.5, j + 0.5, k + 0.5);
  }
  std::size_t index(int i, int j, int k) const {
    return (static_cast<std::size_t>(k) * resolution + j) * resolution + i;
  }
  std::size_t cell_count() const {
    return static_cast<std::size_t>(resolution) * resolution * resolution;
  }
};

// Partial projective TSDF. Values are signed distances normalized by the
// truncation, clamped to [-1, 1]; positive is free space on the camera side.
// A voxel is Observed when surface evidence fell within its truncation band.
struct TsdfVolume {
  GridSpec spec;
  std::vector<float> values;
  std::vector<std::uint8_t> observed;

  float value(int i, int j, int k) const { return values[spec.index(i, j, k)]; }
  bool is_observed(int i, int j, int k) const { return observed[spec.index(i, j, k)] != 0; }
};

// Projective TSDF of a canonical-frame cloud seen from camera_center_cano.
// For each voxel the nearest cloud point by angle off the voxel's camera ray
// supplies the surface range; the signed distance is (range to surface) -
// (range to voxel). Voxels whose band test fails are Unobserved: +1 when the
// evidence says carved free space, -1 when occluded behind the surface, and
// +1 when the ray has no evidence at all.
TsdfVolume voxelize_tsdf(const PointCloud& cloud_cano, const Vec3& camera_center_cano,
                         const GridSpec& spec = {});

}  // namespace graspkit
