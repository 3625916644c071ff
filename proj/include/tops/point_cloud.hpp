#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace tops {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Raised when a segment collapses to nothing usable (empty after
/// filtering, zero slices, ...). Callers skip the object.
class DegenerateSegmentError : public std::runtime_error {
 public:
  explicit DegenerateSegmentError(const std::string& what)
      : std::runtime_error(what) {}
};

class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

class FingerprintMismatchError : public std::runtime_error {
 public:
  explicit FingerprintMismatchError(const std::string& what)
      : std::runtime_error(what) {}
};

/// Ordered set of 3D points, optionally with index-aligned unit normals.
/// Coordinates are in scaled model units (1 unit = 1/sigma_s meters once
/// preprocess() has run).
struct PointCloud {
  std::vector<Vec3> points;
  std::vector<Vec3> normals;  // empty, or same size as points

  bool has_normals() const { return !normals.empty(); }
  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
};

struct Aabb {
  Vec3 min{Vec3::Constant(std::numeric_limits<double>::infinity())};
  Vec3 max{Vec3::Constant(-std::numeric_limits<double>::infinity())};

  Vec3 extent() const { return max - min; }
  Vec3 center() const { return 0.5 * (min + max); }
  double volume() const {
    const Vec3 e = extent();
    return e.x() * e.y() * e.z();
  }
};

inline Aabb bounding_box(const PointCloud& cloud) {
  Aabb box;
  for (const Vec3& p : cloud.points) {
    box.min = box.min.cwiseMin(p);
    box.max = box.max.cwiseMax(p);
  }
  return box;
}

inline PointCloud transformed(const PointCloud& cloud, const Mat3& rotation,
                              const Vec3& translation) {
  PointCloud out;
  out.points.reserve(cloud.size());
  for (const Vec3& p : cloud.points) out.points.push_back(rotation * p + translation);
  if (cloud.has_normals()) {
    out.normals.reserve(cloud.size());
    for (const Vec3& n : cloud.normals) out.normals.push_back(rotation * n);
  }
  return out;
}

/// Translate so the axis-aligned box's min corner is exactly the origin.
inline PointCloud to_first_octant(const PointCloud& cloud, Vec3* shift = nullptr) {
  if (cloud.empty()) return cloud;
  const Vec3 lo = bounding_box(cloud).min;
  PointCloud out = cloud;
  for (Vec3& p : out.points) p -= lo;
  if (shift) *shift = -lo;
  return out;
}

struct PreprocessParams {
  double scale_factor = 2.5;        // sigma_s
  double voxel_size = 0.03;         // scaled units
  double outlier_radius = 5e-2;     // scaled units
  int outlier_min_neighbors = 220;  // neighbors, excluding the point itself
  bool outlier_removal_enabled = true;

  void validate() const {
    if (scale_factor <= 0 || voxel_size <= 0 || outlier_radius <= 0)
      throw ConfigError("preprocess parameters must be positive");
    if (outlier_min_neighbors < 1)
      throw ConfigError("outlier_min_neighbors must be >= 1");
  }
};

namespace detail {

struct VoxelKey {
  std::int64_t x, y, z;
  bool operator==(const VoxelKey&) const = default;
};

struct VoxelKeyHash {
  std::size_t operator()(const VoxelKey& k) const {
    std::uint64_t h = 1469598103934665603ull;
    for (std::int64_t v : {k.x, k.y, k.z}) {
      h ^= static_cast<std::uint64_t>(v);
      h *= 1099511628211ull;
    }
    return static_cast<std::size_t>(h);
  }
};

}  // namespace detail

/// One centroid point per occupied voxel; first-seen voxel order, so the
/// result is deterministic for a fixed input order.
inline PointCloud voxel_downsample(const PointCloud& cloud, double voxel_size) {
  struct Acc {
    Vec3 sum{Vec3::Zero()};
    std::size_t count = 0;
  };
  std::unordered_map<detail::VoxelKey, Acc, detail::VoxelKeyHash> grid;
  std::vector<detail::VoxelKey> order;
  grid.reserve(cloud.size());
  for (const Vec3& p : cloud.points) {
    const detail::VoxelKey key{
        static_cast<std::int64_t>(std::floor(p.x() / voxel_size)),
        static_cast<std::int64_t>(std::floor(p.y() / voxel_size)),
        static_cast<std::int64_t>(std::floor(p.z() / voxel_size))};
    auto [it, inserted] = grid.try_emplace(key);
    if (inserted) order.push_back(key);
    it->second.sum += p;
    it->second.count++;
  }
  PointCloud out;
  out.points.reserve(order.size());
  for (const detail::VoxelKey& key : order) {
    const Acc& acc = grid.at(key);
    out.points.push_back(acc.sum / static_cast<double>(acc.count));
  }
  return out;
}

}  // namespace tops
