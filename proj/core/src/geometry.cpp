#include "rope/geometry.hpp"

#include <limits>

namespace rope {

PointBehindCameraError::PointBehindCameraError(int index, double depth)
    : std::runtime_error("point " + std::to_string(index) +
                         " behind camera (depth " + std::to_string(depth) + " mm)"),
      index_(index) {}

bool Pose::IsValidRotation(double tol) const {
  const Eigen::Matrix3d err = rotation.transpose() * rotation - Eigen::Matrix3d::Identity();
  if (err.cwiseAbs().maxCoeff() > tol) return false;
  return std::abs(rotation.determinant() - 1.0) <= tol;
}

Pose Compose(const Pose& a, const Pose& b) {
  // (a ∘ b)(p) = a(b(p))
  Pose out;
  out.rotation = a.rotation * b.rotation;
  out.translation = a.rotation * b.translation + a.translation;
  return out;
}

Pose Invert(const Pose& p) {
  Pose out;
  out.rotation = p.rotation.transpose();
  out.translation = -(p.rotation.transpose() * p.translation);
  return out;
}

std::vector<Eigen::Vector3d> Transform(const Pose& pose,
                                       const std::vector<Eigen::Vector3d>& points) {
  std::vector<Eigen::Vector3d> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(pose.rotation * p + pose.translation);
  return out;
}

Eigen::Vector2d ProjectPoint(const Eigen::Vector3d& point, const Pose& pose,
                             const CameraIntrinsics& intr) {
  const Eigen::Vector3d pc = pose.rotation * point + pose.translation;
  if (pc.z() <= 1e-6) throw PointBehindCameraError(-1, pc.z());
  return {intr.fx * pc.x() / pc.z() + intr.cx, intr.fy * pc.y() / pc.z() + intr.cy};
}

std::vector<Eigen::Vector2d> Project(const std::vector<Eigen::Vector3d>& points,
                                     const Pose& pose, const CameraIntrinsics& intr) {
  std::vector<Eigen::Vector2d> out;
  out.reserve(points.size());
  for (size_t i = 0; i < points.size(); ++i) {
    const Eigen::Vector3d pc = pose.rotation * points[i] + pose.translation;
    if (pc.z() <= 1e-6) throw PointBehindCameraError(static_cast<int>(i), pc.z());
    out.emplace_back(intr.fx * pc.x() / pc.z() + intr.cx,
                     intr.fy * pc.y() / pc.z() + intr.cy);
  }
  return out;
}

double Diameter(const PointCloud& cloud) {
  const auto& pts = cloud.points;
  if (pts.size() < 2) throw std::invalid_argument("diameter requires at least 2 points");
  double best = 0.0;
  for (size_t i = 0; i + 1 < pts.size(); ++i)
    for (size_t j = i + 1; j < pts.size(); ++j)
      best = std::max(best, (pts[i] - pts[j]).norm());
  return best;
}

std::vector<Landmark3D> FpsSelect(const PointCloud& cloud, int k) {
  const auto& pts = cloud.points;
  const int n = static_cast<int>(pts.size());
  if (k < 1) throw std::invalid_argument("fps k must be >= 1");
  if (k > n) throw std::invalid_argument("fps k exceeds cloud size");

  Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
  for (const auto& p : pts) centroid += p;
  centroid /= static_cast<double>(n);

  int seed = 0;
  double best = -1.0;
  for (int i = 0; i < n; ++i) {
    const double d = (pts[i] - centroid).norm();
    if (d > best) {
      best = d;
      seed = i;
    }
  }

  std::vector<Landmark3D> selected;
  selected.reserve(k);
  std::vector<double> min_dist(n, std::numeric_limits<double>::infinity());
  int current = seed;
  for (int round = 0; round < k; ++round) {
    selected.push_back({round, pts[current]});
    int next = -1;
    double next_dist = -1.0;
    for (int i = 0; i < n; ++i) {
      min_dist[i] = std::min(min_dist[i], (pts[i] - pts[current]).norm());
      if (min_dist[i] > next_dist) {
        next_dist = min_dist[i];
        next = i;
      }
    }
    current = next;
  }
  return selected;
}

}  // namespace rope
