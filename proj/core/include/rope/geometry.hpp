#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

namespace rope {

// Rigid transform mapping object-frame points (mm) to the camera frame.
struct Pose {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();

  static Pose Identity() { return Pose{}; }

  // rotation orthonormal and det = +1, both within tol per entry.
  bool IsValidRotation(double tol = 1e-9) const;
};

// Pinhole intrinsics, pixel units. No distortion model.
struct CameraIntrinsics {
  double fx = 0.0;
  double fy = 0.0;
  double cx = 0.0;
  double cy = 0.0;
};

struct PointCloud {
  std::vector<Eigen::Vector3d> points;  // object frame, mm
  bool symmetric = false;               // selects ADD-S over ADD
};

struct Landmark3D {
  int index = 0;
  Eigen::Vector3d coords = Eigen::Vector3d::Zero();  // mm
};

// Image coordinates: origin at the top-left pixel center, +x right, +y down.
struct Landmark2D {
  int index = 0;
  Eigen::Vector2d coords = Eigen::Vector2d::Zero();  // px
};

class PointBehindCameraError : public std::runtime_error {
 public:
  PointBehindCameraError(int index, double depth);
  int index() const { return index_; }

 private:
  int index_;
};

Pose Compose(const Pose& a, const Pose& b);
Pose Invert(const Pose& p);

std::vector<Eigen::Vector3d> Transform(const Pose& pose,
                                       const std::vector<Eigen::Vector3d>& points);

// Pinhole projection. Throws PointBehindCameraError if a transformed point
// has depth <= 1e-6 mm.
std::vector<Eigen::Vector2d> Project(const std::vector<Eigen::Vector3d>& points,
                                     const Pose& pose, const CameraIntrinsics& intr);

Eigen::Vector2d ProjectPoint(const Eigen::Vector3d& point, const Pose& pose,
                             const CameraIntrinsics& intr);

// Maximum pairwise distance. Throws std::invalid_argument for < 2 points.
double Diameter(const PointCloud& cloud);

// Greedy farthest point sampling. Seeded at the point farthest from the
// centroid, ties broken by lowest index; each next pick maximizes the minimum
// distance to the already-selected set. Deterministic, no RNG.
std::vector<Landmark3D> FpsSelect(const PointCloud& cloud, int k);

// ASCII PLY subset: "element vertex N" with float/double x,y,z properties;
// all other elements and properties are ignored. Coordinates taken as mm.
PointCloud LoadPly(const std::string& path);
void SavePly(const PointCloud& cloud, const std::string& path);

}  // namespace rope
