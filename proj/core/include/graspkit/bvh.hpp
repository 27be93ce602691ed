#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "graspkit/mesh.hpp"

namespace graspkit {

struct RayHit {
  double t = std::numeric_limits<double>::max();  // ray parameter of the hit
  std::uint32_t triangle = 0;
  double u = 0, v = 0;  // barycentric coordinates at the hit
};

// Bounding volume hierarchy over mesh triangles for first-hit ray queries.
// The ray direction need not be normalized; `t` is reported in units of the
// direction vector's length.
class TriangleBvh {
 public:
  explicit TriangleBvh(const TriMesh& mesh);

  // Nearest intersection with t in (t_min, t_max), if any.
  std::optional<RayHit> first_hit(const Vec3& origin, const Vec3& dir,
                                  double t_min = 1e-9,
                                  double t_max = std::numeric_limits<double>::max()) const;

  bool any_hit(const Vec3& origin, const Vec3& dir, double t_min,
               double t_max) const;

 private:
  struct Node {
    Vec3 lo, hi;
    std::uint32_t begin = 0, end = 0;
    std::int32_t left = -1, right = -1;
    bool leaf() const { return left < 0; }
  };

  void build(std::uint32_t node, std::uint32_t begin, std::uint32_t end);

  std::vector<Vec3> va_, e1_, e2_;  // per-triangle vertex A and edges
  std::vector<Vec3> centroids_;
  std::vector<std::uint32_t> order_;
  std::vector<Node> nodes_;
  static constexpr std::uint32_t kLeafSize = 4;
};

}  // namespace graspkit
