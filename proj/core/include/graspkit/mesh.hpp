#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "graspkit/geometry.hpp"

namespace graspkit {

// Grasping posture labels. Values are the on-disk PLY encoding.
enum class PostureLabel : std::uint8_t {
  NonGraspable = 0,
  MediumWrap = 1,
  Tripod = 2,
};

struct Aabb {
  Vec3 lo{0, 0, 0};
  Vec3 hi{0, 0, 0};

  bool empty() const { return (hi.array() < lo.array()).any(); }
  Vec3 extent() const { return hi - lo; }
  double diagonal() const { return empty() ? 0.0 : extent().norm(); }
};

// Triangle mesh with optional per-vertex normals, shape confidence, and
// posture labels. The optional channels are either empty or vertex-sized.
struct TriMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<std::uint32_t, 3>> triangles;
  std::vector<Vec3> normals;            // unit length when present
  std::vector<float> confidence;        // >= 0
  std::vector<PostureLabel> postures;

  bool has_normals() const { return normals.size() == vertices.size() && !vertices.empty(); }
  bool has_confidence() const { return confidence.size() == vertices.size() && !vertices.empty(); }
  bool has_postures() const { return postures.size() == vertices.size() && !vertices.empty(); }
};

Aabb bounding_box(const TriMesh& mesh);
double surface_area(const TriMesh& mesh);
Vec3 surface_centroid(const TriMesh& mesh);
// Signed volume via divergence theorem; meaningful for closed meshes.
double signed_volume(const TriMesh& mesh);

// Applies a similarity transform to vertices; normals are rotated only.
TriMesh transformed(const TriMesh& mesh, const SimilarityPose& pose);

// Per-vertex normals as the normalized angle-weighted average of incident
// triangle normals. Throws DegenerateVertex if a vertex has no
// non-degenerate incident triangle.
void compute_vertex_normals(TriMesh& mesh);

// Drops triangles with area below `min_area` and unreferenced vertices.
void remove_degenerate_triangles(TriMesh& mesh, double min_area = 1e-12);

double intersection_over_union(const Aabb& a, const Aabb& b);

}  // namespace graspkit
