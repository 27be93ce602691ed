#include "graspkit/mise.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "graspkit/mc_tables.hpp"

namespace graspkit {

IsoLattice IsoLattice::over_grid(const OccupancyGrid& grid, int res) {
  if (grid.resolution < 2) throw InvalidParams("IsoLattice: grid too small");
  if (res < 2) throw InvalidParams("IsoLattice: resolution too small");
  IsoLattice lat;
  lat.lo = grid.origin + Vec3::Constant(0.5 * grid.voxel_size);
  const double span = (grid.resolution - 1) * grid.voxel_size;
  lat.cell = Vec3::Constant(span / res);
  lat.res = res;
  return lat;
}

std::uint32_t EdgeWeldedMesher::edge_vertex(int cx, int cy, int cz, int edge,
                                            const std::array<double, 8>& values) {
  const int ca = mc::kEdgeCorners[edge][0];
  const int cb = mc::kEdgeCorners[edge][1];
  int ga[3] = {cx + mc::kCornerOffset[ca][0], cy + mc::kCornerOffset[ca][1],
               cz + mc::kCornerOffset[ca][2]};
  int gb[3] = {cx + mc::kCornerOffset[cb][0], cy + mc::kCornerOffset[cb][1],
               cz + mc::kCornerOffset[cb][2]};
  double va = values[ca], vb = values[cb];

  int axis = 0;
  for (int k = 0; k < 3; ++k) {
    if (ga[k] != gb[k]) axis = k;
  }
  // Canonical endpoint order (lower lattice corner first) so both adjacent
  // cells interpolate bit-identically.
  if (ga[axis] > gb[axis]) {
    std::swap(ga[0], gb[0]);
    std::swap(ga[1], gb[1]);
    std::swap(ga[2], gb[2]);
    std::swap(va, vb);
  }
  const EdgeKey key{axis, ga[0], ga[1], ga[2]};
  const auto it = edge_to_vertex_.find(key);
  if (it != edge_to_vertex_.end()) return it->second;

  const double denom = vb - va;
  const double t = denom == 0.0 ? 0.5 : std::clamp((iso_ - va) / denom, 0.0, 1.0);
  Vec3 p = lattice_.corner(ga[0], ga[1], ga[2]);
  p[axis] += t * lattice_.cell[axis];

  const auto idx = static_cast<std::uint32_t>(mesh_.vertices.size());
  mesh_.vertices.push_back(p);
  edge_to_vertex_.emplace(key, idx);
  return idx;
}

void EdgeWeldedMesher::march_cell(int cx, int cy, int cz,
                                  const std::array<double, 8>& values) {
  int cube_index = 0;
  for (int c = 0; c < 8; ++c) {
    if (values[c] < iso_) cube_index |= 1 << c;
  }
  if (mc::kEdgeTable[cube_index] == 0) return;

  const std::int8_t* tri = mc::kTriTable[cube_index];
  for (int t = 0; tri[t] != -1; t += 3) {
    const std::uint32_t a = edge_vertex(cx, cy, cz, tri[t], values);
    const std::uint32_t b = edge_vertex(cx, cy, cz, tri[t + 1], values);
    const std::uint32_t c = edge_vertex(cx, cy, cz, tri[t + 2], values);
    // Table winding has normals pointing toward values below iso (outward
    // for occupancy fields where inside is high).
    mesh_.triangles.push_back({a, b, c});
  }
}

TriMesh EdgeWeldedMesher::take_mesh() {
  remove_degenerate_triangles(mesh_);
  return std::move(mesh_);
}

namespace {

struct CellRange {
  int x, y, z;
};

// Conservative interval test: can the trilinear interpolant of `grid` cross
// `iso` anywhere inside the box [lo, hi]? The interpolant inside one grid
// interpolation cell is bounded by that cell's corner values, so the
// min/max over all overlapped cells bounds the field in the box.
bool interval_may_cross(const OccupancyGrid& grid, const Vec3& lo, const Vec3& hi,
                        double iso) {
  const Vec3 grid_lo = grid.origin + Vec3::Constant(0.5 * grid.voxel_size);
  const int n = grid.resolution;
  int a[3], b[3];
  for (int k = 0; k < 3; ++k) {
    a[k] = std::clamp(static_cast<int>(std::floor((lo[k] - grid_lo[k]) / grid.voxel_size)),
                      0, n - 2);
    b[k] = std::clamp(static_cast<int>(std::floor((hi[k] - grid_lo[k]) / grid.voxel_size)),
                      0, n - 2);
  }
  float mn = std::numeric_limits<float>::max();
  float mx = std::numeric_limits<float>::lowest();
  for (int k = a[2]; k <= b[2] + 1; ++k) {
    for (int j = a[1]; j <= b[1] + 1; ++j) {
      for (int i = a[0]; i <= b[0] + 1; ++i) {
        const float v = grid.value(i, j, k);
        mn = std::min(mn, v);
        mx = std::max(mx, v);
      }
    }
  }
  return mn <= iso && iso <= mx;
}

}  // namespace

TriMesh extract_mesh_mise(const OccupancyGrid& occ, double iso, int initial_res,
                          int refinement_steps) {
  if (occ.resolution < 2 || occ.values.empty()) {
    throw InvalidParams("extract_mesh_mise: invalid grid");
  }
  if (!(iso > 0.0 && iso < 1.0)) throw InvalidParams("extract_mesh_mise: iso must be in (0,1)");
  if (initial_res < 2 || refinement_steps < 0) {
    throw InvalidParams("extract_mesh_mise: bad lattice parameters");
  }

  const int final_res = initial_res << refinement_steps;
  const IsoLattice fine = IsoLattice::over_grid(occ, final_res);

  // Coarse-to-fine active cell refinement.
  std::vector<CellRange> active;
  const int res0 = initial_res;
  const double span = (occ.resolution - 1) * occ.voxel_size;
  {
    const double cell0 = span / res0;
    for (int z = 0; z < res0; ++z) {
      for (int y = 0; y < res0; ++y) {
        for (int x = 0; x < res0; ++x) {
          const Vec3 lo = fine.lo + cell0 * Vec3(x, y, z);
          const Vec3 hi = lo + Vec3::Constant(cell0);
          if (interval_may_cross(occ, lo, hi, iso)) active.push_back({x, y, z});
        }
      }
    }
  }
  for (int step = 1; step <= refinement_steps; ++step) {
    const int res = res0 << step;
    const double cell = span / res;
    std::vector<CellRange> next;
    next.reserve(active.size() * 4);
    for (const CellRange& c : active) {
      for (int dz = 0; dz < 2; ++dz) {
        for (int dy = 0; dy < 2; ++dy) {
          for (int dx = 0; dx < 2; ++dx) {
            const CellRange child{2 * c.x + dx, 2 * c.y + dy, 2 * c.z + dz};
            const Vec3 lo = fine.lo + cell * Vec3(child.x, child.y, child.z);
            const Vec3 hi = lo + Vec3::Constant(cell);
            if (interval_may_cross(occ, lo, hi, iso)) next.push_back(child);
          }
        }
      }
    }
    active = std::move(next);
  }

  EdgeWeldedMesher mesher(fine, iso);
  std::array<double, 8> values;
  for (const CellRange& c : active) {
    for (int corner = 0; corner < 8; ++corner) {
      const int ix = c.x + mc::kCornerOffset[corner][0];
      const int iy = c.y + mc::kCornerOffset[corner][1];
      const int iz = c.z + mc::kCornerOffset[corner][2];
      values[corner] = sample_trilinear(occ, fine.corner(ix, iy, iz));
    }
    mesher.march_cell(c.x, c.y, c.z, values);
  }

  TriMesh mesh = mesher.take_mesh();
  if (mesh.triangles.empty()) throw EmptySurface("extract_mesh_mise: no iso crossing");
  return mesh;
}

}  // namespace graspkit
