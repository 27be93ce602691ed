#pragma once

#include <array>
#include <cstdint>
#include <unordered_map>

#include "graspkit/completion.hpp"
#include "graspkit/mesh.hpp"

namespace graspkit {

// Uniform cell lattice spanning the interpolable box of an occupancy grid.
struct IsoLattice {
  Vec3 lo{0, 0, 0};
  Vec3 cell{0, 0, 0};  // per-axis cell size
  int res = 0;         // cells per axis

  static IsoLattice over_grid(const OccupancyGrid& grid, int res);
  Vec3 corner(int ix, int iy, int iz) const {
    return lo + Vec3(ix * cell.x(), iy * cell.y(), iz * cell.z());
  }
};

// Marching-cubes mesher that welds shared vertices exactly by keying them on
// the global lattice edge they sit on. Feeding it every cell of the lattice
// or only a superset of the iso-crossing cells yields the identical mesh.
class EdgeWeldedMesher {
 public:
  EdgeWeldedMesher(const IsoLattice& lattice, double iso)
      : lattice_(lattice), iso_(iso) {}

  // Corner values in the standard marching-cubes corner order.
  void march_cell(int cx, int cy, int cz, const std::array<double, 8>& values);

  // Welded result; degenerate (sub-1e-12 area) triangles removed.
  TriMesh take_mesh();

 private:
  struct EdgeKey {
    std::int32_t axis, x, y, z;
    bool operator==(const EdgeKey&) const = default;
  };
  struct EdgeKeyHash {
    std::size_t operator()(const EdgeKey& k) const {
      std::size_t h = static_cast<std::size_t>(k.axis);
      for (std::int32_t v : {k.x, k.y, k.z}) {
        h ^= static_cast<std::size_t>(v) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
      }
      return h;
    }
  };

  std::uint32_t edge_vertex(int cx, int cy, int cz, int edge,
                            const std::array<double, 8>& values);

  IsoLattice lattice_;
  double iso_;
  std::unordered_map<EdgeKey, std::uint32_t, EdgeKeyHash> edge_to_vertex_;
  TriMesh mesh_;
};

// Multi-resolution iso-surface extraction: coarse lattice cells that can
// contain the iso level (conservative interval test against the underlying
// grid values) are subdivided `refinement_steps` times, then marching cubes
// runs on the surviving finest cells. Equivalent to dense marching cubes at
// resolution initial_res * 2^refinement_steps over the same interpolated
// field. Triangles are wound so normals point toward lower occupancy.
TriMesh extract_mesh_mise(const OccupancyGrid& occ, double iso = 0.5,
                          int initial_res = 32, int refinement_steps = 2);

}  // namespace graspkit
