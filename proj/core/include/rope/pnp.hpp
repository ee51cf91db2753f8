#pragma once

#include <cstdint>
#include <vector>

#include "rope/filter.hpp"
#include "rope/geometry.hpp"

namespace rope {

struct Correspondence {
  int index = 0;
  Eigen::Vector2d image = Eigen::Vector2d::Zero();   // px
  Eigen::Vector3d object = Eigen::Vector3d::Zero();  // mm
};

struct RansacConfig {
  double reproj_threshold = 3.0;  // px
  double confidence = 0.999;
  int max_iterations = 1000;
  uint64_t seed = 0;
};

struct PnpResult {
  Pose pose;
  bool valid = false;
  std::vector<int> inlier_indices;      // positions into the correspondence list
  double mean_reproj_error = 0.0;       // px, over inliers
  int iterations_run = 0;
};

// Minimal solve from exactly 4 correspondences: P3P (Grunert's quartic) on a
// non-collinear triple, remaining point used for disambiguation. Candidates
// are returned sorted by the disambiguating point's reprojection error and
// are guaranteed to have valid rotations and positive depths for all 4
// points. Degenerate input yields an empty list.
std::vector<Pose> MinimalPnp(const std::vector<Correspondence>& corr,
                             const CameraIntrinsics& intr);

// Levenberg-Marquardt minimization of the total squared reprojection error.
// Rotation is updated multiplicatively by an axis-angle increment, so the
// iterate never drifts off SO(3). Accepted steps never increase the cost;
// stops on step norm < 1e-10 or max_iters.
Pose RefinePose(const Pose& initial, const std::vector<Correspondence>& corr,
                const CameraIntrinsics& intr, int max_iters = 100);

// Jacobian of the reprojection residual (projected - observed) of one object
// point w.r.t. the 6-dim perturbation [axis-angle increment; translation],
// with R <- exp([w]x) R, t <- t + dt, evaluated at zero perturbation.
Eigen::Matrix<double, 2, 6> ReprojectionJacobian(const Pose& pose,
                                                 const Eigen::Vector3d& object_point,
                                                 const CameraIntrinsics& intr);

// Reprojection error in px; +inf when the point falls behind the camera.
double ReprojectionError(const Pose& pose, const Correspondence& c,
                         const CameraIntrinsics& intr);

// Seeded RANSAC over MinimalPnp hypotheses with reprojection-error inlier
// scoring, adaptive iteration count, and a final refinement pass on the best
// inlier set. Deterministic per (corr, intr, cfg).
PnpResult RansacPnp(const std::vector<Correspondence>& corr,
                    const CameraIntrinsics& intr, const RansacConfig& cfg);

PnpResult RansacPnp(const FilteredCorrespondences& filtered,
                    const CameraIntrinsics& intr, const RansacConfig& cfg);

}  // namespace rope
