#include <doctest.h>

#include "rope/metrics.hpp"
#include "rope/rng.hpp"

using namespace rope;

namespace {

Pose RandomPose(Pcg32& rng) {
  const Eigen::Vector3d axis =
      Eigen::Vector3d(rng.Normal(), rng.Normal(), rng.Normal()).normalized();
  Pose pose;
  pose.rotation = Eigen::AngleAxisd(rng.UniformRange(-M_PI, M_PI), axis).toRotationMatrix();
  pose.translation = {rng.UniformRange(-30, 30), rng.UniformRange(-30, 30),
                      rng.UniformRange(500, 800)};
  return pose;
}

PointCloud RandomCloud(Pcg32& rng, int n) {
  PointCloud cloud;
  for (int i = 0; i < n; ++i)
    cloud.points.emplace_back(rng.UniformRange(-50, 50), rng.UniformRange(-50, 50),
                              rng.UniformRange(-50, 50));
  return cloud;
}

}  // namespace

TEST_CASE("add is zero for identical poses and equals a pure translation") {
  Pcg32 rng(61);
  const PointCloud cloud = RandomCloud(rng, 40);
  const Pose gt = RandomPose(rng);
  CHECK(AddDistance(gt, gt, cloud).value == doctest::Approx(0.0));

  Pose shifted = gt;
  shifted.translation += Eigen::Vector3d(3, 4, 0);  // offset norm 5
  const PoseDistance d = AddDistance(shifted, gt, cloud);
  CHECK(d.value == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(d.kind == PoseDistance::Kind::kAdd);
}

TEST_CASE("add matches a direct mean-of-norms oracle") {
  Pcg32 rng(62);
  for (int trial = 0; trial < 10; ++trial) {
    const PointCloud cloud = RandomCloud(rng, 25);
    const Pose a = RandomPose(rng);
    const Pose b = RandomPose(rng);
    double mean = 0.0;
    for (const auto& p : cloud.points)
      mean += ((a.rotation * p + a.translation) - (b.rotation * p + b.translation)).norm();
    mean /= static_cast<double>(cloud.points.size());
    CHECK(AddDistance(a, b, cloud).value == doctest::Approx(mean).epsilon(1e-12));
  }
}

TEST_CASE("add-s is never larger than add") {
  Pcg32 rng(63);
  for (int trial = 0; trial < 10; ++trial) {
    const PointCloud cloud = RandomCloud(rng, 30);
    const Pose a = RandomPose(rng);
    const Pose b = RandomPose(rng);
    CHECK(AddsDistance(a, b, cloud).value <= AddDistance(a, b, cloud).value + 1e-12);
    CHECK(AddsDistance(a, b, cloud).kind == PoseDistance::Kind::kAddS);
  }
}

TEST_CASE("add-s sees a 90-degree rotation of a symmetric square as near zero") {
  PointCloud square;
  square.points = {{10, 0, 0}, {0, 10, 0}, {-10, 0, 0}, {0, -10, 0}};
  Pose gt = Pose::Identity();
  gt.translation = {0, 0, 600};
  Pose rotated = gt;
  rotated.rotation = Eigen::AngleAxisd(M_PI / 2.0, Eigen::Vector3d::UnitZ()).toRotationMatrix();
  CHECK(AddDistance(rotated, gt, square).value > 10.0);
  CHECK(AddsDistance(rotated, gt, square).value == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("add-s equals the exhaustive closest-point scan exactly") {
  Pcg32 rng(64);
  for (int trial = 0; trial < 10; ++trial) {
    const PointCloud cloud = RandomCloud(rng, 200);
    const Pose a = RandomPose(rng);
    const Pose b = RandomPose(rng);

    const auto pa = Transform(a, cloud.points);
    const auto pb = Transform(b, cloud.points);
    double mean = 0.0;
    for (const auto& q : pa) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& p : pb) best = std::min(best, (q - p).norm());
      mean += best;
    }
    mean /= static_cast<double>(pa.size());
    CHECK(AddsDistance(a, b, cloud).value == mean);  // bit-exact
  }
}

TEST_CASE("pass threshold is strictly below 10 percent of the diameter") {
  const double diameter = 100.0;
  CHECK(PoseCorrect({9.999, PoseDistance::Kind::kAdd}, diameter));
  CHECK_FALSE(PoseCorrect({10.0, PoseDistance::Kind::kAdd}, diameter));
  CHECK_FALSE(PoseCorrect({10.001, PoseDistance::Kind::kAdd}, diameter));
  CHECK(PoseCorrect({19.9, PoseDistance::Kind::kAdd}, diameter, 0.2));
}

TEST_CASE("auc analytic values") {
  CHECK(Auc({0.0}) == doctest::Approx(1.0));
  CHECK(Auc({200.0}) == doctest::Approx(0.0));
  CHECK(Auc({50.0}) == doctest::Approx(0.5));
  CHECK(Auc({0.0, 100.0}) == doctest::Approx(0.5));
  CHECK(Auc({std::numeric_limits<double>::infinity()}) == doctest::Approx(0.0));
  CHECK_THROWS_AS(Auc({}), std::invalid_argument);
}

TEST_CASE("auc matches a fine-grid riemann oracle") {
  Pcg32 rng(65);
  std::vector<double> dists;
  for (int i = 0; i < 37; ++i) dists.push_back(rng.UniformRange(0, 150));
  const double T = 100.0;
  const int steps = 2000000;
  double riemann = 0.0;
  for (int s = 0; s < steps; ++s) {
    const double t = (s + 0.5) * T / steps;
    int below = 0;
    for (double d : dists) below += d < t;
    riemann += static_cast<double>(below) / dists.size();
  }
  riemann /= steps;
  CHECK(Auc(dists, T) == doctest::Approx(riemann).epsilon(1e-4));
}

TEST_CASE("coherence hand-worked case") {
  // Errors: (2, 0) and (0, 0). m = (1, 0); r = {2, 0}; c = {1, 1}.
  std::vector<Landmark2D> pred = {{0, {12, 5}}, {1, {7, 9}}};
  std::vector<Landmark2D> gt = {{0, {10, 5}}, {1, {7, 9}}};
  const CoherenceReport rep = Coherence(pred, gt);
  REQUIRE(rep.residuals.size() == 2);
  CHECK(rep.residuals[0] == doctest::Approx(2.0));
  CHECK(rep.residuals[1] == doctest::Approx(0.0));
  CHECK(rep.mean_error_vector.x() == doctest::Approx(1.0));
  CHECK(rep.mean_error_vector.y() == doctest::Approx(0.0));
  CHECK(rep.incoherence[0] == doctest::Approx(1.0));
  CHECK(rep.incoherence[1] == doctest::Approx(1.0));
  CHECK(rep.mean_r == doctest::Approx(1.0));
  CHECK(rep.mean_c == doctest::Approx(1.0));
}

TEST_CASE("a shared translation has zero incoherence but nonzero residuals") {
  Pcg32 rng(66);
  std::vector<Landmark2D> gt, pred;
  const Eigen::Vector2d shift(3.0, -4.0);
  for (int i = 0; i < 9; ++i) {
    const Eigen::Vector2d p(rng.UniformRange(0, 64), rng.UniformRange(0, 64));
    gt.push_back({i, p});
    pred.push_back({i, p + shift});
  }
  const CoherenceReport rep = Coherence(pred, gt);
  CHECK(rep.mean_r == doctest::Approx(5.0));
  CHECK(rep.mean_c == doctest::Approx(0.0).epsilon(1e-12));
  CHECK((rep.mean_error_vector - shift).norm() < 1e-12);

  CHECK_THROWS_AS(Coherence(pred, std::vector<Landmark2D>{}), std::invalid_argument);
}
