#pragma once

// Exact nearest-neighbor distance queries.
//
// KdTree answers min-distance queries over a fixed point set; BruteForceIndex
// is the obviously-correct linear scan used as its test oracle.  Both return
// +infinity for an empty set (the distance-to-empty-set convention the
// classifier relies on), and both are exact: the tree prunes with squared
// distances and never approximates, so its answers match the scan bitwise.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include "core.hpp"

namespace invariset {

class BruteForceIndex {
 public:
  BruteForceIndex() = default;
  explicit BruteForceIndex(PointBuffer points) : points_(std::move(points)) {}

  std::size_t size() const noexcept { return points_.size(); }

  double squared_distance(std::span<const double> q) const noexcept {
    double best = kInfinity;
    for (std::size_t i = 0; i < points_.size(); ++i)
      best = std::min(best, invariset::squared_distance(points_[i], q));
    return best;
  }

  double distance(std::span<const double> q) const noexcept {
    return std::sqrt(squared_distance(q));
  }

 private:
  PointBuffer points_;
};

/// Balanced kd-tree over a point buffer.  Immutable once built; queries are
/// safe from any number of threads.
class KdTree {
 public:
  KdTree() = default;

  explicit KdTree(PointBuffer points) : points_(std::move(points)) {
    const std::size_t n = points_.size();
    if (n == 0) return;
    order_.resize(n);
    std::iota(order_.begin(), order_.end(), std::uint32_t{0});
    nodes_.reserve(2 * n / kLeafSize + 2);
    root_ = build(0, n);
  }

  std::size_t size() const noexcept { return points_.size(); }
  std::size_t dim() const noexcept { return points_.dim(); }

  double squared_distance(std::span<const double> q) const noexcept {
    if (points_.empty()) return kInfinity;
    double best = kInfinity;
    search(root_, q, best);
    return best;
  }

  double distance(std::span<const double> q) const noexcept {
    return std::sqrt(squared_distance(q));
  }

 private:
  static constexpr std::size_t kLeafSize = 12;

  struct Node {
    double split = 0.0;          // splitting coordinate value
    std::int32_t left = -1;      // children for interior nodes
    std::int32_t right = -1;
    std::uint32_t begin = 0;     // order_ range for leaves
    std::uint32_t end = 0;
    std::uint16_t axis = 0;
    bool leaf = false;
  };

  std::int32_t build(std::size_t begin, std::size_t end) {
    Node node;
    if (end - begin <= kLeafSize) {
      node.leaf = true;
      node.begin = static_cast<std::uint32_t>(begin);
      node.end = static_cast<std::uint32_t>(end);
      nodes_.push_back(node);
      return static_cast<std::int32_t>(nodes_.size() - 1);
    }

    // Split on the axis with the largest spread; robust for skewed data.
    const std::size_t d = points_.dim();
    std::size_t axis = 0;
    double best_spread = -1.0;
    for (std::size_t j = 0; j < d; ++j) {
      double lo = points_[order_[begin]][j];
      double hi = lo;
      for (std::size_t i = begin + 1; i < end; ++i) {
        const double v = points_[order_[i]][j];
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      if (hi - lo > best_spread) {
        best_spread = hi - lo;
        axis = j;
      }
    }

    const std::size_t mid = begin + (end - begin) / 2;
    std::nth_element(order_.begin() + static_cast<std::ptrdiff_t>(begin),
                     order_.begin() + static_cast<std::ptrdiff_t>(mid),
                     order_.begin() + static_cast<std::ptrdiff_t>(end),
                     [&](std::uint32_t a, std::uint32_t b) {
                       const double va = points_[a][axis];
                       const double vb = points_[b][axis];
                       if (va != vb) return va < vb;
                       return a < b;  // total order => deterministic layout
                     });

    node.axis = static_cast<std::uint16_t>(axis);
    node.split = points_[order_[mid]][axis];
    const std::int32_t self = static_cast<std::int32_t>(nodes_.size());
    nodes_.push_back(node);
    const std::int32_t left = build(begin, mid);
    const std::int32_t right = build(mid, end);
    nodes_[static_cast<std::size_t>(self)].left = left;
    nodes_[static_cast<std::size_t>(self)].right = right;
    return self;
  }

  void search(std::int32_t idx, std::span<const double> q,
              double& best) const noexcept {
    const Node& node = nodes_[static_cast<std::size_t>(idx)];
    if (node.leaf) {
      for (std::uint32_t i = node.begin; i < node.end; ++i) {
        const double d2 = invariset::squared_distance(points_[order_[i]], q);
        if (d2 < best) best = d2;
      }
      return;
    }
    const double diff = q[node.axis] - node.split;
    const std::int32_t near = diff < 0.0 ? node.left : node.right;
    const std::int32_t far = diff < 0.0 ? node.right : node.left;
    search(near, q, best);
    if (diff * diff < best) search(far, q, best);
  }

  PointBuffer points_;
  std::vector<std::uint32_t> order_;
  std::vector<Node> nodes_;
  std::int32_t root_ = -1;
};

/// Exact minimal Euclidean distance from x to the indexed set; +infinity for
/// an empty index.
inline double nn_distance(const KdTree& index, std::span<const double> x) {
  return index.distance(x);
}

}  // namespace invariset
