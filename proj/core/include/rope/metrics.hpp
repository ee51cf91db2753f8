#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rope/geometry.hpp"

namespace rope {

struct PoseDistance {
  enum class Kind { kAdd, kAddS };
  double value = 0.0;  // mm
  Kind kind = Kind::kAdd;
};

struct CoherenceReport {
  std::vector<double> residuals;        // r_i, px
  Eigen::Vector2d mean_error_vector;    // m, px
  std::vector<double> incoherence;      // c_i, px
  double mean_r = 0.0;
  double mean_c = 0.0;
};

// Mean distance between the model transformed by the two poses, matched
// point-to-point.
PoseDistance AddDistance(const Pose& pred, const Pose& gt, const PointCloud& cloud);

// Closest-point variant for symmetric objects; nearest-neighbor accelerated,
// exactly equal to the O(n^2) scan.
PoseDistance AddsDistance(const Pose& pred, const Pose& gt, const PointCloud& cloud);

// Strict inequality: correct iff distance < fraction * diameter.
bool PoseCorrect(const PoseDistance& dist, double diameter, double fraction = 0.1);

// Exact area under the accuracy-vs-threshold step curve over [0, max_threshold],
// normalized to [0, 1]. acc(t) = fraction of distances < t.
double Auc(const std::vector<double>& distances, double max_threshold = 100.0);

// Per-landmark residuals r_i = ||x_i - x_i*||, mean error vector m, and
// incoherence c_i = ||(x_i - x_i*) - m||.
CoherenceReport Coherence(const std::vector<Landmark2D>& pred,
                          const std::vector<Landmark2D>& gt);

}  // namespace rope
