#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "graspkit/geometry.hpp"

namespace graspkit {

// Exact nearest-neighbor index over 3D points. Median-split build,
// depth-first query with hyperplane pruning. Equal distances tie-break to
// the smaller point index so results match an index-ordered linear scan.
class KdTree3 {
 public:
  KdTree3() = default;
  explicit KdTree3(std::vector<Vec3> points);

  std::size_t size() const { return points_.size(); }
  const Vec3& point(std::size_t i) const { return points_[i]; }

  // Index and squared distance of the nearest point.
  std::pair<std::uint32_t, double> nearest(const Vec3& query) const;

  // k nearest, sorted by (distance, index) ascending.
  std::vector<std::pair<std::uint32_t, double>> knearest(const Vec3& query,
                                                         std::size_t k) const;

 private:
  struct Node {
    Vec3 lo, hi;                 // bounds of this node's points
    std::uint32_t begin, end;    // range into order_
    std::int32_t left = -1, right = -1;
    bool leaf() const { return left < 0; }
  };

  void build(std::uint32_t node, std::uint32_t begin, std::uint32_t end);

  template <typename Visit>
  void search(std::uint32_t node, const Vec3& query, double& worst, Visit&& visit) const;

  std::vector<Vec3> points_;
  std::vector<std::uint32_t> order_;
  std::vector<Node> nodes_;
  static constexpr std::uint32_t kLeafSize = 16;
};

}  // namespace graspkit
