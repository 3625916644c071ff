#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>

#include "tops/point_cloud.hpp"

namespace tops {

/// Oriented bounding box. Axes are the columns of `axes`, orthonormal,
/// right-handed, ordered by descending extent. `extents` are full side
/// lengths.
struct OrientedBox {
  Vec3 center{Vec3::Zero()};
  Mat3 axes{Mat3::Identity()};
  Vec3 extents{Vec3::Zero()};
  bool degenerate = false;

  double volume() const { return extents.x() * extents.y() * extents.z(); }
};

namespace detail {

// Extent of the cloud along each row of R (box frame = R * world).
inline Vec3 frame_extents(const std::vector<Vec3>& pts, const Mat3& frame,
                          Vec3* mid_local = nullptr) {
  Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
  Vec3 hi = -lo;
  for (const Vec3& p : pts) {
    const Vec3 q = frame * p;
    lo = lo.cwiseMin(q);
    hi = hi.cwiseMax(q);
  }
  if (mid_local) *mid_local = 0.5 * (lo + hi);
  return hi - lo;
}

inline double frame_volume(const std::vector<Vec3>& pts, const Mat3& frame) {
  const Vec3 e = frame_extents(pts, frame);
  return e.x() * e.y() * e.z();
}

inline Mat3 axis_rotation(int axis, double angle) {
  return Eigen::AngleAxisd(angle, Vec3::Unit(axis)).toRotationMatrix();
}

// Coordinate descent over per-axis rotations of the box frame, with a
// coarse pass followed by shrinking steps. Deterministic.
inline Mat3 refine_frame(const std::vector<Vec3>& pts, Mat3 frame) {
  double best = frame_volume(pts, frame);
  auto sweep = [&](double lo, double hi, double step) {
    bool improved = false;
    for (int axis = 0; axis < 3; ++axis) {
      Mat3 arg_best = frame;
      for (double a = lo; a <= hi + 1e-12; a += step) {
        if (std::abs(a) < 1e-15) continue;
        const Mat3 cand = axis_rotation(axis, a) * frame;
        const double v = frame_volume(pts, cand);
        if (v < best - 1e-15) {
          best = v;
          arg_best = cand;
          improved = true;
        }
      }
      frame = arg_best;
    }
    return improved;
  };
  // Coarse pass escapes bad seeds (isotropic PCA).
  for (int it = 0; it < 4; ++it)
    if (!sweep(-45.0 * M_PI / 180.0, 45.0 * M_PI / 180.0, 5.0 * M_PI / 180.0))
      break;
  double step = 10.0 * M_PI / 180.0;
  while (step > 0.02 * M_PI / 180.0) {
    for (int it = 0; it < 6; ++it)
      if (!sweep(-step, step, step / 10.0)) break;
    step *= 0.5;
  }
  return frame;
}

inline Mat3 pca_frame(const std::vector<Vec3>& pts) {
  Vec3 mean = Vec3::Zero();
  for (const Vec3& p : pts) mean += p;
  mean /= static_cast<double>(pts.size());
  Mat3 cov = Mat3::Zero();
  for (const Vec3& p : pts) {
    const Vec3 d = p - mean;
    cov += d * d.transpose();
  }
  cov /= static_cast<double>(pts.size());
  Eigen::SelfAdjointEigenSolver<Mat3> eig(cov);
  Mat3 basis = eig.eigenvectors();  // columns, ascending eigenvalue
  basis.col(0).swap(basis.col(2));  // descending
  if (basis.determinant() < 0) basis.col(2) = -basis.col(2);
  return basis.transpose();  // rows are the principal directions
}

}  // namespace detail

/// Local-minimum-volume oriented bounding box: PCA seed plus identity seed,
/// refined by per-axis angle search. Largest extent maps to axes.col(0).
/// Degenerate (near coplanar/collinear) extents are clamped to
/// `extent_floor` and flagged.
inline OrientedBox min_volume_obb(const PointCloud& cloud,
                                  double extent_floor = 1e-6) {
  if (cloud.empty()) throw DegenerateSegmentError("min_volume_obb: empty cloud");
  const std::vector<Vec3>& pts = cloud.points;

  Mat3 frame = Mat3::Identity();
  if (pts.size() >= 3) {
    const Mat3 from_pca = detail::refine_frame(pts, detail::pca_frame(pts));
    const Mat3 from_identity = detail::refine_frame(pts, Mat3::Identity());
    frame = detail::frame_volume(pts, from_pca) <=
                    detail::frame_volume(pts, from_identity)
                ? from_pca
                : from_identity;
  }

  Vec3 mid_local;
  Vec3 extents = detail::frame_extents(pts, frame, &mid_local);

  // Sort axes by descending extent.
  std::array<int, 3> order{0, 1, 2};
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return extents[a] > extents[b]; });

  OrientedBox box;
  box.center = frame.transpose() * mid_local;
  Vec3 a0 = frame.row(order[0]);
  Vec3 a1 = frame.row(order[1]);
  // Sign convention: non-negative dot with the global axis of the same
  // index, right-handed completion. Residual ambiguity is what
  // mirror_augment covers.
  if (a0.x() < 0) a0 = -a0;
  if (a1.y() < 0) a1 = -a1;
  const Vec3 a2 = a0.cross(a1);
  box.axes.col(0) = a0;
  box.axes.col(1) = a1;
  box.axes.col(2) = a2;
  box.extents = Vec3(extents[order[0]], extents[order[1]], extents[order[2]]);
  for (int i = 0; i < 3; ++i) {
    if (box.extents[i] < extent_floor) {
      box.extents[i] = extent_floor;
      box.degenerate = true;
    }
  }
  return box;
}

}  // namespace tops
