#pragma once

#include <string>

#include "graspkit/shapes.hpp"
#include "graspkit/tsdf.hpp"

namespace graspkit {

// Voxelized occupancy probability over the same lattice as its source TSDF.
struct OccupancyGrid {
  int resolution = 0;
  Vec3 origin{0, 0, 0};
  double voxel_size = 0;
  std::vector<float> values;  // in [0, 1]

  std::size_t index(int i, int j, int k) const {
    return (static_cast<std::size_t>(k) * resolution + j) * resolution + i;
  }
  float value(int i, int j, int k) const { return values[index(i, j, k)]; }
  float& value(int i, int j, int k) { return values[index(i, j, k)]; }
  Vec3 center(int i, int j, int k) const {
    return origin + voxel_size * Vec3(i + 0.5, j + 0.5, k + 0.5);
  }
};

enum class CompletionStrategy { RevolutionPrior, MirrorPrior, PartialOnly };

CompletionStrategy strategy_from_string(const std::string& s);
std::string to_string(CompletionStrategy s);

// Pluggable shape completer configuration. The revolution prior treats
// canonical +Z as the revolution axis, recovers off-axis residual structure
// (handles) by mirroring, and optionally fills the profile solid.
struct Completer {
  CompletionStrategy strategy = CompletionStrategy::RevolutionPrior;
  Category category = Category::Cup;
  // Radial histogram resolution as a fraction of the voxel size.
  double radial_bin_fraction = 0.125;
  // Evidence beyond this multiple of the row's robust body radius is treated
  // as handle structure and mirrored instead of revolved.
  double handle_radius_factor = 1.15;
  // Rows of solid base fill for open vessels (cups, bowls).
  int base_fill_rows = 2;
  // Radial morphological closing half-width, in voxels.
  double closing_voxels = 1.0;
};

// Binary completion stage: occupancy in {0,1} before smoothing.
OccupancyGrid complete_binary(const TsdfVolume& tsdf, const Completer& completer);

// Full completion: binary stage followed by one 3x3x3 box-filter pass,
// clamped to [0,1].
OccupancyGrid complete(const TsdfVolume& tsdf, const Completer& completer);

// Trilinear interpolation of the grid treated as samples at voxel centers.
// The query must lie inside the interpolable box
// [origin + voxel/2, origin + (N - 1/2) voxel].
double sample_trilinear(const OccupancyGrid& grid, const Vec3& p);

// Norm of the central-difference gradient of the interpolated occupancy at
// v, step h = voxel_size / 2. Throws OutOfBounds when the stencil leaves the
// interpolable box.
double vertex_confidence(const OccupancyGrid& grid, const Vec3& v);

}  // namespace graspkit
