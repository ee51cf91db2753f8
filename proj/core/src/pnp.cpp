#include "rope/pnp.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/Geometry>
#include <algorithm>
#include <cmath>
#include <limits>

#include "rope/rng.hpp"

namespace rope {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Eigen::Vector3d Bearing(const Eigen::Vector2d& px, const CameraIntrinsics& intr) {
  return Eigen::Vector3d((px.x() - intr.cx) / intr.fx, (px.y() - intr.cy) / intr.fy, 1.0)
      .normalized();
}

bool Collinear(const Eigen::Vector3d& a, const Eigen::Vector3d& b,
               const Eigen::Vector3d& c) {
  const Eigen::Vector3d ab = b - a;
  const Eigen::Vector3d ac = c - a;
  const double denom = ab.norm() * ac.norm();
  if (denom < 1e-12) return true;
  return ab.cross(ac).norm() / denom < 1e-8;
}

// Real roots of c4 x^4 + c3 x^3 + c2 x^2 + c1 x + c0 via the companion
// matrix. Coefficients are normalized by the leading term.
std::vector<double> QuarticRealRoots(double c4, double c3, double c2, double c1,
                                     double c0) {
  if (std::abs(c4) < 1e-14 * std::max({std::abs(c3), std::abs(c2), std::abs(c1), std::abs(c0)}))
    return {};  // effectively lower degree; degenerate geometry upstream
  Eigen::Matrix4d companion = Eigen::Matrix4d::Zero();
  companion(1, 0) = companion(2, 1) = companion(3, 2) = 1.0;
  companion(0, 3) = -c0 / c4;
  companion(1, 3) = -c1 / c4;
  companion(2, 3) = -c2 / c4;
  companion(3, 3) = -c3 / c4;
  Eigen::EigenSolver<Eigen::Matrix4d> solver(companion);
  std::vector<double> roots;
  for (int i = 0; i < 4; ++i) {
    const std::complex<double> r = solver.eigenvalues()(i);
    if (std::abs(r.imag()) < 1e-6 * (1.0 + std::abs(r.real())))
      roots.push_back(r.real());
  }
  return roots;
}

// Rigid transform mapping src points onto dst (Kabsch via SVD).
Pose AbsoluteOrientation(const std::vector<Eigen::Vector3d>& src,
                         const std::vector<Eigen::Vector3d>& dst) {
  Eigen::Vector3d src_mean = Eigen::Vector3d::Zero();
  Eigen::Vector3d dst_mean = Eigen::Vector3d::Zero();
  for (size_t i = 0; i < src.size(); ++i) {
    src_mean += src[i];
    dst_mean += dst[i];
  }
  src_mean /= static_cast<double>(src.size());
  dst_mean /= static_cast<double>(src.size());

  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (size_t i = 0; i < src.size(); ++i)
    cov += (dst[i] - dst_mean) * (src[i] - src_mean).transpose();
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(cov, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Matrix3d d = Eigen::Matrix3d::Identity();
  if ((svd.matrixU() * svd.matrixV().transpose()).determinant() < 0.0) d(2, 2) = -1.0;
  Pose pose;
  pose.rotation = svd.matrixU() * d * svd.matrixV().transpose();
  pose.translation = dst_mean - pose.rotation * src_mean;
  return pose;
}

// Grunert's P3P: solve for the three depths along the bearing rays, then
// recover the pose by absolute orientation. Returns up to 4 poses.
std::vector<Pose> SolveP3p(const Eigen::Vector3d pts[3], const Eigen::Vector3d rays[3]) {
  const double a = (pts[1] - pts[2]).norm();  // opposite ray 0
  const double b = (pts[0] - pts[2]).norm();  // opposite ray 1
  const double c = (pts[0] - pts[1]).norm();  // opposite ray 2
  const double cos_alpha = rays[1].dot(rays[2]);
  const double cos_beta = rays[0].dot(rays[2]);
  const double cos_gamma = rays[0].dot(rays[1]);
  const double a2 = a * a, b2 = b * b, c2 = c * c;

  // With u = s2/s1, v = s3/s1 the law-of-cosines system reduces to two
  // quadratics in u whose v-dependent resultant is a quartic in v:
  //   f1 = b2 u^2 - 2 b2 cos_alpha v u + (b2 - a2) v^2 + 2 a2 cos_beta v - a2
  //   f2 = b2 u^2 - 2 b2 cos_gamma u   - c2 v^2 + 2 c2 cos_beta v + b2 - c2
  // The resultant is evaluated at 5 sample values of v via the 4x4 Sylvester
  // determinant and its quartic coefficients recovered by interpolation.
  const auto resultant_at = [&](double v) {
    const double f1_b = -2.0 * b2 * cos_alpha * v;
    const double f1_c = (b2 - a2) * v * v + 2.0 * a2 * cos_beta * v - a2;
    const double f2_b = -2.0 * b2 * cos_gamma;
    const double f2_c = -c2 * v * v + 2.0 * c2 * cos_beta * v + b2 - c2;
    Eigen::Matrix4d sylvester;
    sylvester << b2, f1_b, f1_c, 0.0,
                 0.0, b2, f1_b, f1_c,
                 b2, f2_b, f2_c, 0.0,
                 0.0, b2, f2_b, f2_c;
    return sylvester.determinant();
  };

  const double samples[5] = {-2.0, -1.0, 0.0, 1.0, 2.0};
  Eigen::Matrix<double, 5, 5> vand;
  Eigen::Matrix<double, 5, 1> vals;
  for (int i = 0; i < 5; ++i) {
    double p = 1.0;
    for (int j = 0; j < 5; ++j) {
      vand(i, j) = p;
      p *= samples[i];
    }
    vals(i) = resultant_at(samples[i]);
  }
  const Eigen::Matrix<double, 5, 1> coeff = vand.fullPivLu().solve(vals);

  std::vector<Pose> poses;
  for (double v : QuarticRealRoots(coeff(4), coeff(3), coeff(2), coeff(1), coeff(0))) {
    if (v <= 0.0) continue;
    // u from the linear combination f1 - f2 (the u^2 terms cancel).
    const double lin_u = -2.0 * b2 * cos_alpha * v + 2.0 * b2 * cos_gamma;
    const double lin_c = ((b2 - a2) * v * v + 2.0 * a2 * cos_beta * v - a2) -
                         (-c2 * v * v + 2.0 * c2 * cos_beta * v + b2 - c2);
    if (std::abs(lin_u) < 1e-12) continue;
    const double u = -lin_c / lin_u;
    if (u <= 0.0) continue;

    const double s1_sq = b2 / (1.0 + v * v - 2.0 * v * cos_beta);
    if (!(s1_sq > 0.0)) continue;
    const double s1 = std::sqrt(s1_sq);
    const std::vector<Eigen::Vector3d> cam = {s1 * rays[0], u * s1 * rays[1],
                                              v * s1 * rays[2]};
    const std::vector<Eigen::Vector3d> obj = {pts[0], pts[1], pts[2]};
    poses.push_back(AbsoluteOrientation(obj, cam));
  }
  return poses;
}

}  // namespace

double ReprojectionError(const Pose& pose, const Correspondence& c,
                         const CameraIntrinsics& intr) {
  const Eigen::Vector3d pc = pose.rotation * c.object + pose.translation;
  if (pc.z() <= 1e-6) return kInf;
  const Eigen::Vector2d proj(intr.fx * pc.x() / pc.z() + intr.cx,
                             intr.fy * pc.y() / pc.z() + intr.cy);
  return (proj - c.image).norm();
}

std::vector<Pose> MinimalPnp(const std::vector<Correspondence>& corr,
                             const CameraIntrinsics& intr) {
  if (corr.size() != 4) throw std::invalid_argument("minimal solve needs exactly 4 points");

  // Pick the first non-collinear triple; the leftover point disambiguates.
  static const int kTriples[4][4] = {
      {0, 1, 2, 3}, {0, 1, 3, 2}, {0, 2, 3, 1}, {1, 2, 3, 0}};
  int triple = -1;
  for (int t = 0; t < 4; ++t) {
    if (!Collinear(corr[kTriples[t][0]].object, corr[kTriples[t][1]].object,
                   corr[kTriples[t][2]].object)) {
      triple = t;
      break;
    }
  }
  if (triple < 0) return {};

  Eigen::Vector3d pts[3];
  Eigen::Vector3d rays[3];
  for (int i = 0; i < 3; ++i) {
    pts[i] = corr[kTriples[triple][i]].object;
    rays[i] = Bearing(corr[kTriples[triple][i]].image, intr);
  }

  std::vector<Pose> candidates;
  for (const Pose& pose : SolveP3p(pts, rays)) {
    bool ok = pose.rotation.allFinite() && pose.translation.allFinite();
    for (int i = 0; ok && i < 4; ++i)
      ok = (pose.rotation * corr[i].object + pose.translation).z() > 1e-6;
    if (ok) candidates.push_back(pose);
  }

  const Correspondence& check = corr[kTriples[triple][3]];
  std::stable_sort(candidates.begin(), candidates.end(),
                   [&](const Pose& lhs, const Pose& rhs) {
                     return ReprojectionError(lhs, check, intr) <
                            ReprojectionError(rhs, check, intr);
                   });
  return candidates;
}

Eigen::Matrix<double, 2, 6> ReprojectionJacobian(const Pose& pose,
                                                 const Eigen::Vector3d& object_point,
                                                 const CameraIntrinsics& intr) {
  const Eigen::Vector3d pc = pose.rotation * object_point + pose.translation;
  const double z = pc.z();
  Eigen::Matrix<double, 2, 3> proj;
  proj << intr.fx / z, 0.0, -intr.fx * pc.x() / (z * z),
          0.0, intr.fy / z, -intr.fy * pc.y() / (z * z);

  const Eigen::Vector3d rp = pose.rotation * object_point;
  Eigen::Matrix3d skew;
  skew << 0.0, -rp.z(), rp.y(),
          rp.z(), 0.0, -rp.x(),
          -rp.y(), rp.x(), 0.0;

  Eigen::Matrix<double, 2, 6> jac;
  jac.block<2, 3>(0, 0) = proj * (-skew);  // d pc / d w = -[R p]x
  jac.block<2, 3>(0, 3) = proj;            // d pc / d t = I
  return jac;
}

namespace {

double TotalCost(const Pose& pose, const std::vector<Correspondence>& corr,
                 const CameraIntrinsics& intr) {
  double cost = 0.0;
  for (const auto& c : corr) {
    const Eigen::Vector3d pc = pose.rotation * c.object + pose.translation;
    if (pc.z() <= 1e-6) return kInf;
    const Eigen::Vector2d proj(intr.fx * pc.x() / pc.z() + intr.cx,
                               intr.fy * pc.y() / pc.z() + intr.cy);
    cost += (proj - c.image).squaredNorm();
  }
  return cost;
}

Eigen::Matrix3d AxisAngleExp(const Eigen::Vector3d& w) {
  const double theta = w.norm();
  if (theta < 1e-12) {
    Eigen::Matrix3d skew;
    skew << 0.0, -w.z(), w.y(), w.z(), 0.0, -w.x(), -w.y(), w.x(), 0.0;
    return Eigen::Matrix3d::Identity() + skew;
  }
  return Eigen::AngleAxisd(theta, w / theta).toRotationMatrix();
}

}  // namespace

Pose RefinePose(const Pose& initial, const std::vector<Correspondence>& corr,
                const CameraIntrinsics& intr, int max_iters) {
  if (corr.size() < 4) throw std::invalid_argument("refinement needs >= 4 points");
  Pose pose = initial;
  double cost = TotalCost(pose, corr, intr);
  if (!std::isfinite(cost)) throw std::runtime_error("non-finite initial reprojection cost");

  double lambda = 1e-3;
  for (int iter = 0; iter < max_iters; ++iter) {
    Eigen::Matrix<double, 6, 6> jtj = Eigen::Matrix<double, 6, 6>::Zero();
    Eigen::Matrix<double, 6, 1> jtr = Eigen::Matrix<double, 6, 1>::Zero();
    for (const auto& c : corr) {
      const Eigen::Vector3d pc = pose.rotation * c.object + pose.translation;
      const Eigen::Vector2d proj(intr.fx * pc.x() / pc.z() + intr.cx,
                                 intr.fy * pc.y() / pc.z() + intr.cy);
      const Eigen::Vector2d res = proj - c.image;
      const Eigen::Matrix<double, 2, 6> jac = ReprojectionJacobian(pose, c.object, intr);
      jtj += jac.transpose() * jac;
      jtr += jac.transpose() * res;
    }

    bool stepped = false;
    for (int attempt = 0; attempt < 20; ++attempt) {
      Eigen::Matrix<double, 6, 6> damped = jtj;
      damped.diagonal() += lambda * jtj.diagonal().cwiseMax(1e-12);
      const Eigen::Matrix<double, 6, 1> step = damped.ldlt().solve(-jtr);
      if (!step.allFinite()) break;

      Pose trial;
      trial.rotation = AxisAngleExp(step.head<3>()) * pose.rotation;
      trial.translation = pose.translation + step.tail<3>();
      const double trial_cost = TotalCost(trial, corr, intr);
      if (trial_cost <= cost) {
        pose = trial;
        cost = trial_cost;
        lambda = std::max(lambda * 0.5, 1e-12);
        stepped = step.norm() >= 1e-10;
        if (!stepped) return pose;
        stepped = true;
        break;
      }
      lambda *= 10.0;
    }
    if (!stepped) break;
  }
  return pose;
}

namespace {

// Sample 4 distinct indices by rejection; draw order fixed for determinism.
void SampleQuad(Pcg32& rng, int n, int out[4]) {
  int count = 0;
  while (count < 4) {
    const int candidate = static_cast<int>(rng.UniformBelow(static_cast<uint32_t>(n)));
    bool dup = false;
    for (int i = 0; i < count; ++i) dup = dup || out[i] == candidate;
    if (!dup) out[count++] = candidate;
  }
}

struct Hypothesis {
  Pose pose;
  std::vector<int> inliers;
  double mean_error = kInf;
};

Hypothesis Score(const Pose& pose, const std::vector<Correspondence>& corr,
                 const CameraIntrinsics& intr, double threshold) {
  Hypothesis h;
  h.pose = pose;
  double sum = 0.0;
  for (size_t i = 0; i < corr.size(); ++i) {
    const double e = ReprojectionError(pose, corr[i], intr);
    if (e <= threshold) {
      h.inliers.push_back(static_cast<int>(i));
      sum += e;
    }
  }
  h.mean_error = h.inliers.empty() ? kInf : sum / static_cast<double>(h.inliers.size());
  return h;
}

bool Better(const Hypothesis& a, const Hypothesis& b) {
  if (a.inliers.size() != b.inliers.size()) return a.inliers.size() > b.inliers.size();
  return a.mean_error < b.mean_error;
}

}  // namespace

PnpResult RansacPnp(const std::vector<Correspondence>& corr,
                    const CameraIntrinsics& intr, const RansacConfig& cfg) {
  const int n = static_cast<int>(corr.size());
  if (n < 4) throw std::invalid_argument("ransac needs >= 4 correspondences");
  if (cfg.reproj_threshold <= 0.0 || cfg.confidence <= 0.0 || cfg.confidence >= 1.0)
    throw std::invalid_argument("invalid ransac config");

  Pcg32 rng(cfg.seed);
  Hypothesis best;
  int needed = cfg.max_iterations;
  int iter = 0;
  for (; iter < std::min(needed, cfg.max_iterations); ++iter) {
    int sample[4];
    SampleQuad(rng, n, sample);
    std::vector<Correspondence> quad = {corr[sample[0]], corr[sample[1]],
                                        corr[sample[2]], corr[sample[3]]};
    for (const Pose& candidate : MinimalPnp(quad, intr)) {
      Hypothesis h = Score(candidate, corr, intr, cfg.reproj_threshold);
      if (Better(h, best)) {
        best = std::move(h);
        const double w = static_cast<double>(best.inliers.size()) / n;
        if (w >= 1.0) {
          needed = iter + 1;
        } else {
          const double denom = std::log(1.0 - w * w * w * w);
          needed = denom < 0.0
                       ? static_cast<int>(std::min<double>(
                             cfg.max_iterations,
                             std::ceil(std::log(1.0 - cfg.confidence) / denom)))
                       : cfg.max_iterations;
        }
      }
    }
  }

  PnpResult result;
  result.iterations_run = iter;
  if (best.inliers.size() < 4) {
    result.valid = false;
    result.pose = best.inliers.empty() ? Pose::Identity() : best.pose;
    result.inlier_indices = best.inliers;
    result.mean_reproj_error = best.mean_error;
    return result;
  }

  std::vector<Correspondence> inlier_set;
  inlier_set.reserve(best.inliers.size());
  for (int i : best.inliers) inlier_set.push_back(corr[i]);
  Pose refined = RefinePose(best.pose, inlier_set, intr, 100);

  Hypothesis final = Score(refined, corr, intr, cfg.reproj_threshold);
  if (!Better(final, best) && final.inliers.size() < 4) final = best;

  result.valid = final.inliers.size() >= 4;
  result.pose = final.pose;
  result.inlier_indices = final.inliers;
  result.mean_reproj_error = final.mean_error;
  return result;
}

PnpResult RansacPnp(const FilteredCorrespondences& filtered,
                    const CameraIntrinsics& intr, const RansacConfig& cfg) {
  std::vector<Correspondence> corr;
  corr.reserve(filtered.pairs.size());
  for (const auto& [px, model] : filtered.pairs)
    corr.push_back({px.index, px.coords, model.coords});
  return RansacPnp(corr, intr, cfg);
}

}  // namespace rope
