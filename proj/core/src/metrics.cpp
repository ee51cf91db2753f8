#include "rope/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace rope {

namespace {

// Minimal kd-tree for exact nearest-neighbor queries. Distances are computed
// with the same expression as the brute-force scan so results match it
// exactly.
class KdTree {
 public:
  explicit KdTree(const std::vector<Eigen::Vector3d>& points) : points_(points) {
    index_.resize(points.size());
    std::iota(index_.begin(), index_.end(), 0);
    Build(0, static_cast<int>(points.size()), 0);
  }

  double NearestDistance(const Eigen::Vector3d& query) const {
    double best = std::numeric_limits<double>::infinity();
    Search(query, 0, static_cast<int>(points_.size()), 0, &best);
    return best;
  }

 private:
  void Build(int lo, int hi, int axis) {
    if (hi - lo <= 1) return;
    const int mid = (lo + hi) / 2;
    std::nth_element(index_.begin() + lo, index_.begin() + mid, index_.begin() + hi,
                     [&](int a, int b) { return points_[a][axis] < points_[b][axis]; });
    Build(lo, mid, (axis + 1) % 3);
    Build(mid + 1, hi, (axis + 1) % 3);
  }

  void Search(const Eigen::Vector3d& query, int lo, int hi, int axis,
              double* best) const {
    if (lo >= hi) return;
    const int mid = (lo + hi) / 2;
    const Eigen::Vector3d& p = points_[index_[mid]];
    *best = std::min(*best, (query - p).norm());
    const double delta = query[axis] - p[axis];
    const int next = (axis + 1) % 3;
    if (delta < 0.0) {
      Search(query, lo, mid, next, best);
      if (-delta <= *best) Search(query, mid + 1, hi, next, best);
    } else {
      Search(query, mid + 1, hi, next, best);
      if (delta <= *best) Search(query, lo, mid, next, best);
    }
  }

  const std::vector<Eigen::Vector3d>& points_;
  std::vector<int> index_;
};

}  // namespace

PoseDistance AddDistance(const Pose& pred, const Pose& gt, const PointCloud& cloud) {
  if (cloud.points.empty()) throw std::invalid_argument("empty cloud");
  double sum = 0.0;
  for (const auto& p : cloud.points) {
    const Eigen::Vector3d a = pred.rotation * p + pred.translation;
    const Eigen::Vector3d b = gt.rotation * p + gt.translation;
    sum += (a - b).norm();
  }
  return {sum / static_cast<double>(cloud.points.size()), PoseDistance::Kind::kAdd};
}

PoseDistance AddsDistance(const Pose& pred, const Pose& gt, const PointCloud& cloud) {
  if (cloud.points.empty()) throw std::invalid_argument("empty cloud");
  const std::vector<Eigen::Vector3d> gt_pts = Transform(gt, cloud.points);
  const KdTree tree(gt_pts);
  double sum = 0.0;
  for (const auto& p : cloud.points)
    sum += tree.NearestDistance(pred.rotation * p + pred.translation);
  return {sum / static_cast<double>(cloud.points.size()), PoseDistance::Kind::kAddS};
}

bool PoseCorrect(const PoseDistance& dist, double diameter, double fraction) {
  if (diameter <= 0.0) throw std::invalid_argument("diameter must be positive");
  return dist.value < fraction * diameter;
}

double Auc(const std::vector<double>& distances, double max_threshold) {
  if (distances.empty()) throw std::invalid_argument("auc over empty distance list");
  if (max_threshold <= 0.0) throw std::invalid_argument("max_threshold must be positive");
  // Integral of the step curve equals sum of per-sample clamped gaps.
  double area = 0.0;
  for (double d : distances) {
    if (d < 0.0) throw std::invalid_argument("negative distance");
    area += std::max(0.0, max_threshold - d);
  }
  return area / (static_cast<double>(distances.size()) * max_threshold);
}

CoherenceReport Coherence(const std::vector<Landmark2D>& pred,
                          const std::vector<Landmark2D>& gt) {
  if (pred.size() != gt.size()) throw std::invalid_argument("landmark count mismatch");
  if (pred.empty()) throw std::invalid_argument("empty landmark sets");

  CoherenceReport report;
  const size_t n = pred.size();
  std::vector<Eigen::Vector2d> errors(n);
  Eigen::Vector2d mean = Eigen::Vector2d::Zero();
  for (size_t i = 0; i < n; ++i) {
    errors[i] = pred[i].coords - gt[i].coords;
    mean += errors[i];
  }
  mean /= static_cast<double>(n);
  report.mean_error_vector = mean;

  report.residuals.resize(n);
  report.incoherence.resize(n);
  for (size_t i = 0; i < n; ++i) {
    report.residuals[i] = errors[i].norm();
    report.incoherence[i] = (errors[i] - mean).norm();
  }
  report.mean_r = std::accumulate(report.residuals.begin(), report.residuals.end(), 0.0) /
                  static_cast<double>(n);
  report.mean_c = std::accumulate(report.incoherence.begin(), report.incoherence.end(), 0.0) /
                  static_cast<double>(n);
  return report;
}

}  // namespace rope
