#include "graspkit/tsdf.hpp"

#include <cmath>

#include "graspkit/kdtree.hpp"

namespace graspkit {

void GridSpec::validate() const {
  if (resolution < 8) throw InvalidParams("grid resolution too small");
  if (voxel_size <= 0) throw InvalidParams("voxel_size must be positive");
  if (truncation < voxel_size) throw InvalidParams("truncation must be >= voxel_size");
  if (cone_min <= 0 || cone_scale <= 0) throw InvalidParams("cone parameters must be positive");
}

TsdfVolume voxelize_tsdf(const PointCloud& cloud_cano, const Vec3& camera_center_cano,
                         const GridSpec& spec) {
  spec.validate();
  if (cloud_cano.points.empty()) throw EmptyCloud("voxelize_tsdf: empty cloud");

  // Index the per-point ray directions on the unit sphere; the angular
  // nearest neighbor is the Euclidean nearest among them.
  std::vector<Vec3> dirs;
  std::vector<double> ranges;
  dirs.reserve(cloud_cano.points.size());
  ranges.reserve(cloud_cano.points.size());
  for (const Vec3& p : cloud_cano.points) {
    const Vec3 d = p - camera_center_cano;
    const double r = d.norm();
    if (r < 1e-9) continue;
    dirs.push_back(d / r);
    ranges.push_back(r);
  }
  if (dirs.empty()) throw EmptyCloud("voxelize_tsdf: all points at camera center");
  const KdTree3 tree(dirs);

  TsdfVolume vol;
  vol.spec = spec;
  vol.values.assign(spec.cell_count(), 1.0f);
  vol.observed.assign(spec.cell_count(), 0);

  const int n = spec.resolution;
  const double delta = spec.truncation;
  for (int k = 0; k < n; ++k) {
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        const Vec3 c = spec.center(i, j, k);
        const Vec3 to_voxel = c - camera_center_cano;
        const double dist = to_voxel.norm();
        if (dist < 1e-9) continue;  // voxel at the camera center: free
        const Vec3 dir = to_voxel / dist;

        const auto [idx, sq] = tree.nearest(dir);
        const double half_angle =
            std::max(spec.cone_min, std::atan(spec.cone_scale * spec.voxel_size / dist));
        const double chord_limit = 2.0 * std::sin(0.5 * half_angle);
        const std::size_t at = spec.index(i, j, k);
        if (sq > chord_limit * chord_limit) {
          // No surface evidence along this ray; leave as unobserved free.
          continue;
        }
        const double sdf = ranges[idx] - dist;
        if (sdf > delta) {
          vol.values[at] = 1.0f;  // carved free space in front of the surface
        } else if (sdf < -delta) {
          vol.values[at] = -1.0f;  // occluded behind the surface
        } else {
          vol.values[at] = static_cast<float>(sdf / delta);
          vol.observed[at] = 1;
        }
      }
    }
  }
  return vol;
}

}  // namespace graspkit
