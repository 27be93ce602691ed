#include "graspkit/mesh.hpp"

#include <cmath>
#include <limits>

namespace graspkit {

Aabb bounding_box(const TriMesh& mesh) {
  Aabb box;
  box.lo = Vec3::Constant(std::numeric_limits<double>::max());
  box.hi = Vec3::Constant(std::numeric_limits<double>::lowest());
  for (const Vec3& v : mesh.vertices) {
    box.lo = box.lo.cwiseMin(v);
    box.hi = box.hi.cwiseMax(v);
  }
  return box;
}

double surface_area(const TriMesh& mesh) {
  double area = 0.0;
  for (const auto& t : mesh.triangles) {
    const Vec3& a = mesh.vertices[t[0]];
    const Vec3& b = mesh.vertices[t[1]];
    const Vec3& c = mesh.vertices[t[2]];
    area += 0.5 * (b - a).cross(c - a).norm();
  }
  return area;
}

Vec3 surface_centroid(const TriMesh& mesh) {
  Vec3 acc = Vec3::Zero();
  double total = 0.0;
  for (const auto& t : mesh.triangles) {
    const Vec3& a = mesh.vertices[t[0]];
    const Vec3& b = mesh.vertices[t[1]];
    const Vec3& c = mesh.vertices[t[2]];
    const double area = 0.5 * (b - a).cross(c - a).norm();
    acc += area * (a + b + c) / 3.0;
    total += area;
  }
  if (total <= 0.0) throw EmptyMesh("surface_centroid: zero-area mesh");
  return acc / total;
}

double signed_volume(const TriMesh& mesh) {
  double vol = 0.0;
  for (const auto& t : mesh.triangles) {
    const Vec3& a = mesh.vertices[t[0]];
    const Vec3& b = mesh.vertices[t[1]];
    const Vec3& c = mesh.vertices[t[2]];
    vol += a.dot(b.cross(c)) / 6.0;
  }
  return vol;
}

TriMesh transformed(const TriMesh& mesh, const SimilarityPose& pose) {
  TriMesh out = mesh;
  for (Vec3& v : out.vertices) v = apply_similarity(pose, v);
  for (Vec3& n : out.normals) n = pose.rotation * n;
  return out;
}

void compute_vertex_normals(TriMesh& mesh) {
  if (mesh.vertices.empty()) throw EmptyMesh("compute_vertex_normals: empty mesh");
  mesh.normals.assign(mesh.vertices.size(), Vec3::Zero());
  for (const auto& t : mesh.triangles) {
    const Vec3& a = mesh.vertices[t[0]];
    const Vec3& b = mesh.vertices[t[1]];
    const Vec3& c = mesh.vertices[t[2]];
    const Vec3 fn = (b - a).cross(c - a);
    const double fn_norm = fn.norm();
    if (fn_norm < 2e-12) continue;  // area below 1e-12
    const Vec3 n = fn / fn_norm;
    const Vec3 e[3] = {b - a, c - b, a - c};
    // Corner angle at each vertex weights that triangle's contribution.
    for (int k = 0; k < 3; ++k) {
      const Vec3 u = -e[(k + 2) % 3];
      const Vec3 w = e[k];
      const double denom = u.norm() * w.norm();
      if (denom < 1e-24) continue;
      const double cosang = std::clamp(u.dot(w) / denom, -1.0, 1.0);
      mesh.normals[t[k]] += std::acos(cosang) * n;
    }
  }
  for (std::size_t i = 0; i < mesh.normals.size(); ++i) {
    const double n = mesh.normals[i].norm();
    if (n < 1e-12) {
      throw DegenerateVertex("vertex " + std::to_string(i) +
                             " has no non-degenerate incident triangle");
    }
    mesh.normals[i] /= n;
  }
}

void remove_degenerate_triangles(TriMesh& mesh, double min_area) {
  std::vector<std::array<std::uint32_t, 3>> kept;
  kept.reserve(mesh.triangles.size());
  for (const auto& t : mesh.triangles) {
    if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2]) continue;
    const Vec3& a = mesh.vertices[t[0]];
    const Vec3& b = mesh.vertices[t[1]];
    const Vec3& c = mesh.vertices[t[2]];
    if (0.5 * (b - a).cross(c - a).norm() <= min_area) continue;
    kept.push_back(t);
  }
  mesh.triangles = std::move(kept);

  // Compact away unreferenced vertices.
  std::vector<std::uint32_t> remap(mesh.vertices.size(),
                                   std::numeric_limits<std::uint32_t>::max());
  TriMesh out;
  out.triangles.reserve(mesh.triangles.size());
  for (auto t : mesh.triangles) {
    for (auto& idx : t) {
      if (remap[idx] == std::numeric_limits<std::uint32_t>::max()) {
        remap[idx] = static_cast<std::uint32_t>(out.vertices.size());
        out.vertices.push_back(mesh.vertices[idx]);
        if (mesh.has_normals()) out.normals.push_back(mesh.normals[idx]);
        if (mesh.has_confidence()) out.confidence.push_back(mesh.confidence[idx]);
        if (mesh.has_postures()) out.postures.push_back(mesh.postures[idx]);
      }
      idx = remap[idx];
    }
    out.triangles.push_back(t);
  }
  mesh = std::move(out);
}

double intersection_over_union(const Aabb& a, const Aabb& b) {
  const Vec3 lo = a.lo.cwiseMax(b.lo);
  const Vec3 hi = a.hi.cwiseMin(b.hi);
  const Vec3 d = (hi - lo).cwiseMax(0.0);
  const double inter = d.x() * d.y() * d.z();
  const Vec3 ea = a.extent().cwiseMax(0.0);
  const Vec3 eb = b.extent().cwiseMax(0.0);
  const double uni = ea.x() * ea.y() * ea.z() + eb.x() * eb.y() * eb.z() - inter;
  return uni <= 0.0 ? 0.0 : inter / uni;
}

}  // namespace graspkit
