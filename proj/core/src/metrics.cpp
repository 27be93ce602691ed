#include "graspkit/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "graspkit/kdtree.hpp"

namespace graspkit {

SampledSurface sample_surface(const TriMesh& mesh, std::size_t n, std::uint64_t seed) {
  if (mesh.vertices.empty() || mesh.triangles.empty()) {
    throw EmptyMesh("sample_surface: empty mesh");
  }
  if (n < 1) throw InvalidParams("sample_surface: n must be >= 1");

  // Cumulative area table for area-weighted triangle selection.
  std::vector<double> cum(mesh.triangles.size());
  std::vector<Vec3> tri_normal(mesh.triangles.size());
  double total = 0.0;
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    const Vec3& a = mesh.vertices[tri[0]];
    const Vec3 e1 = mesh.vertices[tri[1]] - a;
    const Vec3 e2 = mesh.vertices[tri[2]] - a;
    const Vec3 cr = e1.cross(e2);
    const double area = 0.5 * cr.norm();
    total += area;
    cum[t] = total;
    tri_normal[t] = area > 1e-18 ? Vec3(cr / cr.norm()) : Vec3::UnitZ();
  }
  if (total <= 0.0) throw EmptyMesh("sample_surface: zero-area mesh");

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);

  SampledSurface out;
  out.points.reserve(n);
  out.normals.reserve(n);
  for (std::size_t s = 0; s < n; ++s) {
    const double pick = uni(rng) * total;
    const auto it = std::lower_bound(cum.begin(), cum.end(), pick);
    const std::size_t t = std::min<std::size_t>(
        static_cast<std::size_t>(it - cum.begin()), mesh.triangles.size() - 1);
    const auto& tri = mesh.triangles[t];
    // Uniform barycentric draw via square-root trick.
    const double r1 = std::sqrt(uni(rng));
    const double r2 = uni(rng);
    const double w0 = 1.0 - r1, w1 = r1 * (1.0 - r2), w2 = r1 * r2;
    out.points.push_back(w0 * mesh.vertices[tri[0]] + w1 * mesh.vertices[tri[1]] +
                         w2 * mesh.vertices[tri[2]]);
    out.normals.push_back(tri_normal[t]);
  }
  return out;
}

ShapeMetrics shape_metrics(const SampledSurface& pred, const SampledSurface& gt) {
  if (pred.points.empty() || gt.points.empty()) {
    throw EmptyCloud("shape_metrics: empty sample set");
  }

  const KdTree3 gt_tree(gt.points);
  const KdTree3 pred_tree(pred.points);

  // Directed sums accumulate in index order so results are reproducible and
  // match a linear-scan oracle bit for bit.
  double acc_sum = 0.0, nc_pred_sum = 0.0;
  for (std::size_t i = 0; i < pred.points.size(); ++i) {
    const auto [idx, sq] = gt_tree.nearest(pred.points[i]);
    acc_sum += std::sqrt(sq);
    nc_pred_sum += std::abs(pred.normals[i].dot(gt.normals[idx]));
  }
  double comp_sum = 0.0, nc_gt_sum = 0.0;
  for (std::size_t i = 0; i < gt.points.size(); ++i) {
    const auto [idx, sq] = pred_tree.nearest(gt.points[i]);
    comp_sum += std::sqrt(sq);
    nc_gt_sum += std::abs(gt.normals[i].dot(pred.normals[idx]));
  }

  ShapeMetrics m;
  m.accuracy = acc_sum / static_cast<double>(pred.points.size());
  m.completeness = comp_sum / static_cast<double>(gt.points.size());
  m.chamfer_l1 = 0.5 * (m.accuracy + m.completeness);
  m.normal_consistency = 0.5 * (nc_pred_sum / static_cast<double>(pred.points.size()) +
                                nc_gt_sum / static_cast<double>(gt.points.size()));
  return m;
}

}  // namespace graspkit
