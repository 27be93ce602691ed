#include "graspkit/bvh.hpp"

#include <algorithm>
#include <numeric>

namespace graspkit {

namespace {

// Moller-Trumbore; t in units of dir length, no backface culling.
inline bool ray_triangle(const Vec3& origin, const Vec3& dir, const Vec3& a,
                         const Vec3& e1, const Vec3& e2, double& t, double& u,
                         double& v) {
  const Vec3 pvec = dir.cross(e2);
  const double det = e1.dot(pvec);
  if (std::abs(det) < 1e-14) return false;
  const double inv_det = 1.0 / det;
  const Vec3 tvec = origin - a;
  u = tvec.dot(pvec) * inv_det;
  if (u < 0.0 || u > 1.0) return false;
  const Vec3 qvec = tvec.cross(e1);
  v = dir.dot(qvec) * inv_det;
  if (v < 0.0 || u + v > 1.0) return false;
  t = e2.dot(qvec) * inv_det;
  return true;
}

inline bool slab_test(const Vec3& lo, const Vec3& hi, const Vec3& origin,
                      const Vec3& inv_dir, double t_min, double t_max) {
  for (int k = 0; k < 3; ++k) {
    double t0 = (lo[k] - origin[k]) * inv_dir[k];
    double t1 = (hi[k] - origin[k]) * inv_dir[k];
    if (inv_dir[k] < 0.0) std::swap(t0, t1);
    t_min = std::max(t_min, t0);
    t_max = std::min(t_max, t1);
    if (t_max < t_min) return false;
  }
  return true;
}

}  // namespace

TriangleBvh::TriangleBvh(const TriMesh& mesh) {
  if (mesh.vertices.empty() || mesh.triangles.empty()) {
    throw EmptyMesh("TriangleBvh: empty mesh");
  }
  const std::size_t n = mesh.triangles.size();
  va_.resize(n);
  e1_.resize(n);
  e2_.resize(n);
  centroids_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& t = mesh.triangles[i];
    const Vec3& a = mesh.vertices[t[0]];
    const Vec3& b = mesh.vertices[t[1]];
    const Vec3& c = mesh.vertices[t[2]];
    va_[i] = a;
    e1_[i] = b - a;
    e2_[i] = c - a;
    centroids_[i] = (a + b + c) / 3.0;
  }
  order_.resize(n);
  std::iota(order_.begin(), order_.end(), 0u);
  nodes_.reserve(2 * n / kLeafSize + 2);
  nodes_.emplace_back();
  build(0, 0, static_cast<std::uint32_t>(n));
}

void TriangleBvh::build(std::uint32_t node, std::uint32_t begin, std::uint32_t end) {
  Node& n = nodes_[node];
  n.begin = begin;
  n.end = end;
  n.lo = Vec3::Constant(std::numeric_limits<double>::max());
  n.hi = Vec3::Constant(std::numeric_limits<double>::lowest());
  for (std::uint32_t i = begin; i < end; ++i) {
    const std::uint32_t tri = order_[i];
    const Vec3 a = va_[tri], b = va_[tri] + e1_[tri], c = va_[tri] + e2_[tri];
    n.lo = n.lo.cwiseMin(a).cwiseMin(b).cwiseMin(c);
    n.hi = n.hi.cwiseMax(a).cwiseMax(b).cwiseMax(c);
  }
  if (end - begin <= kLeafSize) return;

  Vec3 clo = Vec3::Constant(std::numeric_limits<double>::max());
  Vec3 chi = Vec3::Constant(std::numeric_limits<double>::lowest());
  for (std::uint32_t i = begin; i < end; ++i) {
    clo = clo.cwiseMin(centroids_[order_[i]]);
    chi = chi.cwiseMax(centroids_[order_[i]]);
  }
  int axis = 0;
  const double spread = (chi - clo).maxCoeff(&axis);
  if (spread < 1e-15) return;  // coincident centroids, keep as leaf

  const std::uint32_t mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid,
                   order_.begin() + end, [&](std::uint32_t a, std::uint32_t b) {
                     const double pa = centroids_[a][axis], pb = centroids_[b][axis];
                     return pa < pb || (pa == pb && a < b);
                   });
  const auto left = static_cast<std::int32_t>(nodes_.size());
  nodes_.emplace_back();
  nodes_.emplace_back();
  nodes_[node].left = left;
  nodes_[node].right = left + 1;
  build(static_cast<std::uint32_t>(left), begin, mid);
  build(static_cast<std::uint32_t>(left + 1), mid, end);
}

std::optional<RayHit> TriangleBvh::first_hit(const Vec3& origin, const Vec3& dir,
                                             double t_min, double t_max) const {
  const Vec3 inv_dir = dir.cwiseInverse();
  RayHit best;
  best.t = t_max;
  bool found = false;

  std::uint32_t stack[64];
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const Node& n = nodes_[stack[--top]];
    if (!slab_test(n.lo, n.hi, origin, inv_dir, t_min, best.t)) continue;
    if (n.leaf()) {
      for (std::uint32_t i = n.begin; i < n.end; ++i) {
        const std::uint32_t tri = order_[i];
        double t, u, v;
        if (ray_triangle(origin, dir, va_[tri], e1_[tri], e2_[tri], t, u, v) &&
            t > t_min && t < best.t) {
          best = {t, tri, u, v};
          found = true;
        }
      }
    } else {
      stack[top++] = static_cast<std::uint32_t>(n.left);
      stack[top++] = static_cast<std::uint32_t>(n.right);
    }
  }
  if (!found) return std::nullopt;
  return best;
}

bool TriangleBvh::any_hit(const Vec3& origin, const Vec3& dir, double t_min,
                          double t_max) const {
  const Vec3 inv_dir = dir.cwiseInverse();
  std::uint32_t stack[64];
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const Node& n = nodes_[stack[--top]];
    if (!slab_test(n.lo, n.hi, origin, inv_dir, t_min, t_max)) continue;
    if (n.leaf()) {
      for (std::uint32_t i = n.begin; i < n.end; ++i) {
        const std::uint32_t tri = order_[i];
        double t, u, v;
        if (ray_triangle(origin, dir, va_[tri], e1_[tri], e2_[tri], t, u, v) &&
            t > t_min && t < t_max) {
          return true;
        }
      }
    } else {
      stack[top++] = static_cast<std::uint32_t>(n.left);
      stack[top++] = static_cast<std::uint32_t>(n.right);
    }
  }
  return false;
}

}  // namespace graspkit
