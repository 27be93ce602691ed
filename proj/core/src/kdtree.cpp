#include "graspkit/kdtree.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace graspkit {

KdTree3::KdTree3(std::vector<Vec3> points) : points_(std::move(points)) {
  if (points_.empty()) return;
  order_.resize(points_.size());
  std::iota(order_.begin(), order_.end(), 0u);
  nodes_.reserve(2 * points_.size() / kLeafSize + 2);
  nodes_.emplace_back();
  build(0, 0, static_cast<std::uint32_t>(points_.size()));
}

void KdTree3::build(std::uint32_t node, std::uint32_t begin, std::uint32_t end) {
  Node& n = nodes_[node];
  n.begin = begin;
  n.end = end;
  n.lo = Vec3::Constant(std::numeric_limits<double>::max());
  n.hi = Vec3::Constant(std::numeric_limits<double>::lowest());
  for (std::uint32_t i = begin; i < end; ++i) {
    n.lo = n.lo.cwiseMin(points_[order_[i]]);
    n.hi = n.hi.cwiseMax(points_[order_[i]]);
  }
  if (end - begin <= kLeafSize) return;

  int axis = 0;
  (n.hi - n.lo).maxCoeff(&axis);
  const std::uint32_t mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid,
                   order_.begin() + end, [&](std::uint32_t a, std::uint32_t b) {
                     const double pa = points_[a][axis], pb = points_[b][axis];
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

namespace {
double box_sq_dist(const Vec3& lo, const Vec3& hi, const Vec3& q) {
  const Vec3 d = (lo - q).cwiseMax(0.0).cwiseMax(q - hi);
  return d.squaredNorm();
}
}  // namespace

template <typename Visit>
void KdTree3::search(std::uint32_t node, const Vec3& query, double& worst,
                     Visit&& visit) const {
  const Node& n = nodes_[node];
  if (n.leaf()) {
    for (std::uint32_t i = n.begin; i < n.end; ++i) {
      const std::uint32_t idx = order_[i];
      visit(idx, (points_[idx] - query).squaredNorm());
    }
    return;
  }
  const double dl = box_sq_dist(nodes_[n.left].lo, nodes_[n.left].hi, query);
  const double dr = box_sq_dist(nodes_[n.right].lo, nodes_[n.right].hi, query);
  const std::uint32_t first = dl <= dr ? n.left : n.right;
  const std::uint32_t second = dl <= dr ? n.right : n.left;
  const double dfirst = std::min(dl, dr), dsecond = std::max(dl, dr);
  if (dfirst <= worst) search(first, query, worst, visit);
  if (dsecond <= worst) search(second, query, worst, visit);
}

std::pair<std::uint32_t, double> KdTree3::nearest(const Vec3& query) const {
  if (points_.empty()) throw EmptyCloud("KdTree3::nearest on empty index");
  std::uint32_t best = 0;
  double best_d = std::numeric_limits<double>::max();
  double worst = best_d;
  search(0, query, worst, [&](std::uint32_t idx, double d) {
    if (d < best_d || (d == best_d && idx < best)) {
      best_d = d;
      best = idx;
      worst = best_d;
    }
  });
  return {best, best_d};
}

std::vector<std::pair<std::uint32_t, double>> KdTree3::knearest(
    const Vec3& query, std::size_t k) const {
  if (points_.empty()) throw EmptyCloud("KdTree3::knearest on empty index");
  k = std::min(k, points_.size());
  // Max-heap on (distance, index); the root is the current worst candidate.
  std::vector<std::pair<double, std::uint32_t>> heap;
  heap.reserve(k + 1);
  const auto cmp = [](const auto& a, const auto& b) { return a < b; };
  double worst = std::numeric_limits<double>::max();
  search(0, query, worst, [&](std::uint32_t idx, double d) {
    if (heap.size() < k) {
      heap.emplace_back(d, idx);
      std::push_heap(heap.begin(), heap.end(), cmp);
      if (heap.size() == k) worst = heap.front().first;
    } else if (std::make_pair(d, idx) < heap.front()) {
      std::pop_heap(heap.begin(), heap.end(), cmp);
      heap.back() = {d, idx};
      std::push_heap(heap.begin(), heap.end(), cmp);
      worst = heap.front().first;
    }
  });
  std::sort_heap(heap.begin(), heap.end(), cmp);
  std::vector<std::pair<std::uint32_t, double>> out;
  out.reserve(heap.size());
  for (const auto& [d, idx] : heap) out.emplace_back(idx, d);
  return out;
}

}  // namespace graspkit
