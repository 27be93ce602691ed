#pragma once

#include <filesystem>

#include "graspkit/completion.hpp"
#include "graspkit/scene.hpp"
#include "graspkit/tsdf.hpp"

namespace graspkit {

// Grid dump: one JSON header line ('\n'-terminated) followed by the raw
// little-endian float32 payload in x-fastest order. TSDF dumps append one
// observed-flag byte per voxel after the float payload.
void save_occupancy(const OccupancyGrid& grid, const std::filesystem::path& path);
OccupancyGrid load_occupancy(const std::filesystem::path& path);

void save_tsdf(const TsdfVolume& vol, const std::filesystem::path& path);
TsdfVolume load_tsdf(const std::filesystem::path& path);

// Depth raster: raw little-endian float32 at `path`, with a JSON sidecar
// (same stem, .json) holding resolution, intrinsics, and the camera pose.
// The mask is a bare 0/1 byte raster.
void save_depth(const DepthImage& depth, const CameraIntrinsics& intr,
                const std::filesystem::path& f32_path);
std::pair<DepthImage, CameraIntrinsics> load_depth(const std::filesystem::path& f32_path);

void save_mask(const SegmentationMask& mask, const std::filesystem::path& path);
SegmentationMask load_mask(const std::filesystem::path& path, int width, int height);

// Point cloud as PLY (positions, optional normals, no faces).
void save_cloud_ply(const PointCloud& cloud, const std::filesystem::path& path);
PointCloud load_cloud_ply(const std::filesystem::path& path);

}  // namespace graspkit
