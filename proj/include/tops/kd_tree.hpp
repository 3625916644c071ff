#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <queue>
#include <vector>

#include "tops/point_cloud.hpp"

namespace tops {

/// Static 3D kd-tree over a point array. Built once, queried many times
/// (radius counts for outlier removal, kNN for normals/curvature).
class KdTree {
 public:
  explicit KdTree(const std::vector<Vec3>& points) : points_(points) {
    index_.resize(points_.size());
    std::iota(index_.begin(), index_.end(), 0u);
    nodes_.reserve(points_.size());
    if (!index_.empty()) root_ = build(0, index_.size(), 0);
  }

  /// Indices of the k nearest neighbors of `query` (including the query
  /// point itself when it belongs to the indexed set), nearest first.
  std::vector<std::size_t> knn(const Vec3& query, std::size_t k) const {
    Heap heap;
    if (root_ >= 0 && k > 0) search_knn(root_, query, k, heap);
    std::vector<std::size_t> out(heap.size());
    for (std::size_t i = heap.size(); i-- > 0;) {
      out[i] = heap.top().second;
      heap.pop();
    }
    return out;
  }

  /// Number of indexed points with ||p - query|| <= radius, excluding
  /// `self` when given.
  std::size_t count_within(const Vec3& query, double radius,
                           std::ptrdiff_t self = -1) const {
    std::size_t count = 0;
    if (root_ >= 0)
      count_radius(root_, query, radius * radius, self, count);
    return count;
  }

 private:
  using HeapEntry = std::pair<double, std::size_t>;  // (dist^2, point index)
  using Heap = std::priority_queue<HeapEntry>;

  struct Node {
    std::size_t point;
    int left = -1, right = -1;
    int axis;
  };

  int build(std::size_t begin, std::size_t end, int depth) {
    const int axis = depth % 3;
    const std::size_t mid = (begin + end) / 2;
    std::nth_element(index_.begin() + begin, index_.begin() + mid,
                     index_.begin() + end,
                     [&](std::size_t a, std::size_t b) {
                       return points_[a][axis] < points_[b][axis];
                     });
    const int id = static_cast<int>(nodes_.size());
    nodes_.push_back({index_[mid], -1, -1, axis});
    if (mid > begin) nodes_[id].left = build(begin, mid, depth + 1);
    if (mid + 1 < end) nodes_[id].right = build(mid + 1, end, depth + 1);
    return id;
  }

  void search_knn(int id, const Vec3& q, std::size_t k, Heap& heap) const {
    const Node& node = nodes_[id];
    const Vec3& p = points_[node.point];
    const double d2 = (p - q).squaredNorm();
    if (heap.size() < k) {
      heap.emplace(d2, node.point);
    } else if (d2 < heap.top().first) {
      heap.pop();
      heap.emplace(d2, node.point);
    }
    const double delta = q[node.axis] - p[node.axis];
    const int near = delta < 0 ? node.left : node.right;
    const int far = delta < 0 ? node.right : node.left;
    if (near >= 0) search_knn(near, q, k, heap);
    if (far >= 0 && (heap.size() < k || delta * delta < heap.top().first))
      search_knn(far, q, k, heap);
  }

  void count_radius(int id, const Vec3& q, double r2, std::ptrdiff_t self,
                    std::size_t& count) const {
    const Node& node = nodes_[id];
    const Vec3& p = points_[node.point];
    if ((p - q).squaredNorm() <= r2 &&
        static_cast<std::ptrdiff_t>(node.point) != self)
      count++;
    const double delta = q[node.axis] - p[node.axis];
    const int near = delta < 0 ? node.left : node.right;
    const int far = delta < 0 ? node.right : node.left;
    if (near >= 0) count_radius(near, q, r2, self, count);
    if (far >= 0 && delta * delta <= r2) count_radius(far, q, r2, self, count);
  }

  const std::vector<Vec3>& points_;
  std::vector<std::size_t> index_;
  std::vector<Node> nodes_;
  int root_ = -1;
};

namespace detail {

/// Radius outlier removal: keep points with at least `min_neighbors` other
/// points within `radius`.
inline PointCloud remove_radius_outliers(const PointCloud& cloud, double radius,
                                         int min_neighbors) {
  KdTree tree(cloud.points);
  PointCloud out;
  out.points.reserve(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const std::size_t n = tree.count_within(cloud.points[i], radius,
                                            static_cast<std::ptrdiff_t>(i));
    if (n >= static_cast<std::size_t>(min_neighbors))
      out.points.push_back(cloud.points[i]);
  }
  return out;
}

}  // namespace detail

/// Scale by sigma_s, voxel-downsample, then (optionally) drop radius
/// outliers. Throws DegenerateSegmentError when nothing survives.
inline PointCloud preprocess(const PointCloud& cloud,
                             const PreprocessParams& params) {
  params.validate();
  if (cloud.empty()) throw DegenerateSegmentError("preprocess: empty cloud");
  PointCloud scaled;
  scaled.points.reserve(cloud.size());
  for (const Vec3& p : cloud.points) scaled.points.push_back(p * params.scale_factor);
  PointCloud down = voxel_downsample(scaled, params.voxel_size);
  if (params.outlier_removal_enabled)
    down = detail::remove_radius_outliers(down, params.outlier_radius,
                                          params.outlier_min_neighbors);
  if (down.empty())
    throw DegenerateSegmentError("preprocess: all points filtered out");
  return down;
}

}  // namespace tops
