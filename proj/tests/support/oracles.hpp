#pragma once

// Test-only oracles, independent of the implementation paths they check:
// linear-scan nearest neighbors, dense marching cubes over the full lattice,
// analytic occupancy fields, and mesh topology counters.

#include <cstdint>
#include <functional>
#include <vector>

#include "graspkit/completion.hpp"
#include "graspkit/mesh.hpp"
#include "graspkit/metrics.hpp"

namespace graspkit::test {

// Index-ordered linear scan; ties keep the first (lowest-index) minimum.
std::pair<std::uint32_t, double> brute_nearest(const std::vector<Vec3>& pts,
                                               const Vec3& query);

// Chamfer metrics via brute-force scans, summing in index order exactly like
// the production implementation.
ShapeMetrics brute_shape_metrics(const SampledSurface& pred, const SampledSurface& gt);

// Marching cubes over every cell of the lattice at `final_res`; shares the
// per-cell kernel but not the cell-selection logic under test.
TriMesh dense_marching_cubes(const OccupancyGrid& occ, double iso, int final_res);

// Occupancy field helpers.
OccupancyGrid grid_from_function(int resolution, const Vec3& origin, double voxel,
                                 const std::function<double(const Vec3&)>& f);
OccupancyGrid smoothed_sphere_grid(int resolution, const Vec3& center, double radius);
// Random sum of Gaussian blobs, values in [0,1], deterministic in seed.
OccupancyGrid random_blob_grid(int resolution, std::uint64_t seed);

// Topology: every edge shared by exactly two triangles.
bool is_closed_mesh(const TriMesh& mesh);
// Total genus across connected components: C - chi/2.
int total_genus(const TriMesh& mesh);

// Lexicographic sort + pairwise match within tol; true when the vertex sets
// coincide as multisets.
bool vertex_sets_match(const std::vector<Vec3>& a, const std::vector<Vec3>& b,
                       double tol);

}  // namespace graspkit::test
