#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <vector>

#include "tops/obb.hpp"
#include "tops/point_cloud.hpp"

namespace tops {

namespace detail {

using Vec2 = Eigen::Vector2d;

inline double cross2(const Vec2& o, const Vec2& a, const Vec2& b) {
  return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}

// Andrew monotone chain, counter-clockwise, no duplicate endpoint.
inline std::vector<Vec2> convex_hull(std::vector<Vec2> pts) {
  std::sort(pts.begin(), pts.end(), [](const Vec2& a, const Vec2& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const Vec2& a, const Vec2& b) { return a == b; }),
            pts.end());
  const std::size_t n = pts.size();
  if (n < 3) return pts;
  std::vector<Vec2> hull(2 * n);
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    while (k >= 2 && cross2(hull[k - 2], hull[k - 1], pts[i]) <= 0) k--;
    hull[k++] = pts[i];
  }
  for (std::size_t i = n - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower && cross2(hull[k - 2], hull[k - 1], pts[i]) <= 0) k--;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

// Angle (radians) of the minimum-area bounding rectangle of the 2D point
// set, reduced to (-pi/4, pi/4] so the aligning rotation is minimal.
inline double min_area_rect_angle(const std::vector<Vec2>& pts) {
  if (pts.size() < 2) return 0.0;
  const std::vector<Vec2> hull = convex_hull(pts);
  double best_area = std::numeric_limits<double>::infinity();
  double best_angle = 0.0;
  if (hull.size() < 3) {
    const Vec2 d = hull.back() - hull.front();
    best_angle = std::atan2(d.y(), d.x());
  } else {
    for (std::size_t i = 0; i < hull.size(); ++i) {
      const Vec2 e = hull[(i + 1) % hull.size()] - hull[i];
      const double len = e.norm();
      if (len < 1e-15) continue;
      const Vec2 u = e / len;           // edge direction
      const Vec2 v(-u.y(), u.x());      // perpendicular
      double ulo = std::numeric_limits<double>::infinity(), uhi = -ulo;
      double vlo = ulo, vhi = -ulo;
      for (const Vec2& p : hull) {
        const double pu = p.dot(u), pv = p.dot(v);
        ulo = std::min(ulo, pu);
        uhi = std::max(uhi, pu);
        vlo = std::min(vlo, pv);
        vhi = std::max(vhi, pv);
      }
      const double area = (uhi - ulo) * (vhi - vlo);
      if (area < best_area - 1e-15) {
        best_area = area;
        best_angle = std::atan2(u.y(), u.x());
      }
    }
  }
  // Reduce mod pi/2 into (-pi/4, pi/4].
  double a = std::fmod(best_angle, M_PI / 2);
  if (a > M_PI / 4) a -= M_PI / 2;
  if (a <= -M_PI / 4) a += M_PI / 2;
  return a;
}

}  // namespace detail

/// View normalization result: `cloud` satisfies p_norm = rotation * p + translation
/// applied to the input points.
struct NormalizedCloud {
  PointCloud cloud;
  Mat3 rotation{Mat3::Identity()};
  Vec3 translation{Vec3::Zero()};
  bool degenerate = false;
};

/// Rotate so the minimal-volume box is axis aligned (largest extent along
/// x, smallest along z), fine-tune with the x-y and y-z projection
/// rectangles, then translate into the first octant.
inline NormalizedCloud view_normalize_with_transform(const PointCloud& cloud) {
  const OrientedBox obb = min_volume_obb(cloud);
  Mat3 rot = obb.axes.transpose();

  std::vector<Vec3> work(cloud.points.size());
  auto apply = [&](const Mat3& r) {
    for (std::size_t i = 0; i < cloud.points.size(); ++i)
      work[i] = r * cloud.points[i];
  };
  apply(rot);

  std::vector<detail::Vec2> proj(work.size());
  for (std::size_t i = 0; i < work.size(); ++i)
    proj[i] = {work[i].x(), work[i].y()};
  const double az = detail::min_area_rect_angle(proj);
  rot = detail::axis_rotation(2, -az) * rot;
  apply(rot);

  for (std::size_t i = 0; i < work.size(); ++i)
    proj[i] = {work[i].y(), work[i].z()};
  const double ax = detail::min_area_rect_angle(proj);
  rot = detail::axis_rotation(0, -ax) * rot;
  apply(rot);

  NormalizedCloud out;
  out.rotation = rot;
  out.degenerate = obb.degenerate;
  out.cloud.points = std::move(work);
  if (cloud.has_normals()) {
    out.cloud.normals.reserve(cloud.size());
    for (const Vec3& n : cloud.normals) out.cloud.normals.push_back(rot * n);
  }
  Vec3 shift;
  out.cloud = to_first_octant(out.cloud, &shift);
  out.translation = shift;
  return out;
}

inline PointCloud view_normalize(const PointCloud& cloud) {
  return view_normalize_with_transform(cloud).cloud;
}

/// The 8 sign-combination reflections of a view-normalized cloud about the
/// three coordinate planes through the box center, each re-translated into
/// the first octant. Index bit 0/1/2 flips x/y/z; index 0 is the identity.
inline std::vector<PointCloud> mirror_augment(const PointCloud& cloud) {
  std::vector<PointCloud> variants;
  variants.reserve(8);
  const Vec3 c = bounding_box(cloud).center();
  for (int s = 0; s < 8; ++s) {
    const Vec3 sign((s & 1) ? -1.0 : 1.0, (s & 2) ? -1.0 : 1.0,
                    (s & 4) ? -1.0 : 1.0);
    PointCloud m;
    m.points.reserve(cloud.size());
    for (const Vec3& p : cloud.points)
      m.points.push_back(c + (p - c).cwiseProduct(sign));
    if (cloud.has_normals()) {
      m.normals.reserve(cloud.size());
      for (const Vec3& n : cloud.normals) m.normals.push_back(n.cwiseProduct(sign));
    }
    variants.push_back(to_first_octant(m));
  }
  return variants;
}

}  // namespace tops
