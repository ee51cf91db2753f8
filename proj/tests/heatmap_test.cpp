#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "rope/heatmap.hpp"
#include "rope/rng.hpp"

using namespace rope;

namespace {

HeatmapStack RandomDistribution(Pcg32& rng, int channels, int h, int w) {
  HeatmapStack stack;
  stack.width = w;
  stack.height = h;
  stack.channels = channels;
  stack.values.resize(static_cast<size_t>(channels) * h * w);
  for (auto& v : stack.values) v = static_cast<float>(rng.UniformDouble());
  return NormalizeChannels(stack);
}

HeatmapStack PointMass(int w, int h, int x, int y) {
  HeatmapStack stack;
  stack.width = w;
  stack.height = h;
  stack.channels = 1;
  stack.normalized = true;
  stack.values.assign(static_cast<size_t>(w) * h, 0.0f);
  stack.At(0, y, x) = 1.0f;
  return stack;
}

}  // namespace

TEST_CASE("gaussian stack peaks at the landmark pixel and sums to one") {
  const auto stack = MakeGaussianStack({{0, {20, 30}}}, 64, 64, 3.0);
  const auto argmax = DecodeArgmax(stack);
  CHECK(argmax.coords[0].coords == Eigen::Vector2d(20, 30));
  double sum = 0.0;
  for (float v : stack.values) {
    CHECK(v >= 0.0f);
    sum += v;
  }
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("tiny sigma concentrates nearly all mass on the nearest pixel") {
  const auto stack = MakeGaussianStack({{0, {20, 30}}}, 64, 64, 0.1);
  CHECK(stack.At(0, 30, 20) >= 0.99f);
}

TEST_CASE("spatial expectation of a gaussian map recovers the center") {
  const auto stack = MakeGaussianStack({{0, {10.5, 20.5}}}, 64, 64, 3.0);
  const auto decoded = DecodeExpectation(stack);
  CHECK(decoded.coords[0].coords.x() == doctest::Approx(10.5).epsilon(1e-3));
  CHECK(decoded.coords[0].coords.y() == doctest::Approx(20.5).epsilon(1e-3));
}

TEST_CASE("round trip within 0.05 px for landmarks away from borders") {
  Pcg32 rng(21);
  for (double sigma : {8.0, 3.0, 1.5}) {
    const double margin = 4.0 * sigma;
    for (int trial = 0; trial < 50; ++trial) {
      const Eigen::Vector2d c(rng.UniformRange(margin, 127 - margin),
                              rng.UniformRange(margin, 127 - margin));
      const auto stack = MakeGaussianStack({{0, c}}, 128, 128, sigma);
      const auto decoded = DecodeExpectation(stack);
      CHECK((decoded.coords[0].coords - c).norm() < 0.05);
    }
  }
}

TEST_CASE("softmax basics") {
  HeatmapStack stack;
  stack.width = 2;
  stack.height = 1;
  stack.channels = 1;
  stack.values = {0.0f, static_cast<float>(std::log(3.0))};
  const auto soft = SoftmaxChannels(stack);
  CHECK(soft.At(0, 0, 0) == doctest::Approx(0.25).epsilon(1e-6));
  CHECK(soft.At(0, 0, 1) == doctest::Approx(0.75).epsilon(1e-6));
  CHECK(soft.normalized);

  // constant channel -> uniform
  HeatmapStack flat;
  flat.width = 4;
  flat.height = 4;
  flat.channels = 1;
  flat.values.assign(16, 2.5f);
  const auto uniform = SoftmaxChannels(flat);
  for (float v : uniform.values) CHECK(v == doctest::Approx(1.0 / 16.0));

  // shift invariance
  HeatmapStack shifted = stack;
  for (auto& v : shifted.values) v += 7.5f;
  const auto soft2 = SoftmaxChannels(shifted);
  for (size_t i = 0; i < soft.values.size(); ++i)
    CHECK(soft2.values[i] == doctest::Approx(soft.values[i]).epsilon(1e-6));
}

TEST_CASE("jsd is zero on equal inputs and ln 2 on disjoint point masses") {
  Pcg32 rng(22);
  const auto p = RandomDistribution(rng, 3, 8, 8);
  CHECK(JsdLoss(p, p) == doctest::Approx(0.0).epsilon(1e-12));

  const auto a = PointMass(8, 8, 1, 1);
  const auto b = PointMass(8, 8, 6, 3);
  CHECK(JsdLoss(a, b) == doctest::Approx(std::log(2.0)).epsilon(1e-9));
}

TEST_CASE("jsd matches an independent term-by-term oracle and is symmetric") {
  Pcg32 rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    const auto p = RandomDistribution(rng, 2, 10, 7);
    const auto q = RandomDistribution(rng, 2, 10, 7);

    // Oracle: direct KL sums with the 0*log0 = 0 convention.
    double total = 0.0;
    for (int k = 0; k < 2; ++k) {
      double kl_pm = 0.0, kl_qm = 0.0;
      for (int y = 0; y < 10; ++y)
        for (int x = 0; x < 7; ++x) {
          const double pv = p.At(k, y, x);
          const double qv = q.At(k, y, x);
          const double m = 0.5 * (pv + qv);
          if (pv > 0.0) kl_pm += pv * std::log(pv / m);
          if (qv > 0.0) kl_qm += qv * std::log(qv / m);
        }
      total += 0.5 * kl_pm + 0.5 * kl_qm;
    }
    const double expected = total / 2.0;

    CHECK(JsdLoss(p, q) == doctest::Approx(expected).epsilon(1e-10));
    CHECK(std::abs(JsdLoss(p, q) - JsdLoss(q, p)) < 1e-12);
    CHECK(JsdLoss(p, q) >= 0.0);
    CHECK(JsdLoss(p, q) <= std::log(2.0) + 1e-12);
  }
}

TEST_CASE("jsd rejects shape mismatch") {
  Pcg32 rng(24);
  const auto p = RandomDistribution(rng, 1, 4, 4);
  const auto q = RandomDistribution(rng, 1, 4, 5);
  CHECK_THROWS_AS(JsdLoss(p, q), std::invalid_argument);
}

TEST_CASE("expectation decode handles uniform, point mass and mixtures") {
  HeatmapStack uniform;
  uniform.width = 11;
  uniform.height = 7;
  uniform.channels = 1;
  uniform.values.assign(77, 1.0f);
  const auto u = DecodeExpectation(uniform);  // unnormalized path
  CHECK(u.coords[0].coords.x() == doctest::Approx(5.0));
  CHECK(u.coords[0].coords.y() == doctest::Approx(3.0));

  const auto pm = DecodeExpectation(PointMass(32, 32, 12, 9));
  CHECK(pm.coords[0].coords == Eigen::Vector2d(12, 9));
  CHECK(pm.peak_mass[0] == doctest::Approx(1.0));

  HeatmapStack mix = PointMass(32, 32, 0, 0);
  mix.At(0, 0, 0) = 0.5f;
  mix.At(0, 0, 10) = 0.5f;
  const auto m = DecodeExpectation(mix);
  CHECK(m.coords[0].coords.x() == doctest::Approx(5.0));
  CHECK(m.coords[0].coords.y() == doctest::Approx(0.0));
}

TEST_CASE("expectation decode is invariant under channel renormalization") {
  Pcg32 rng(25);
  const auto p = RandomDistribution(rng, 1, 16, 16);
  HeatmapStack scaled = p;
  for (auto& v : scaled.values) v *= 37.0f;
  scaled.normalized = false;
  const auto a = DecodeExpectation(p);
  const auto b = DecodeExpectation(NormalizeChannels(scaled));
  CHECK((a.coords[0].coords - b.coords[0].coords).norm() < 1e-4);
}

TEST_CASE("argmax decode ties break row-major and off-grid centers hit a neighbor") {
  HeatmapStack uniform;
  uniform.width = 5;
  uniform.height = 5;
  uniform.channels = 1;
  uniform.values.assign(25, 1.0f);
  CHECK(DecodeArgmax(uniform).coords[0].coords == Eigen::Vector2d(0, 0));

  const auto g = MakeGaussianStack({{0, {10.5, 20.5}}}, 64, 64, 2.0);
  const auto am = DecodeArgmax(g).coords[0].coords;
  CHECK((am.x() == 10 || am.x() == 11));
  CHECK((am.y() == 20 || am.y() == 21));
}

TEST_CASE("expectation decoding resists outliers better than argmax") {
  // Point-mass-dominated channel; corrupt 1% of pixels with tiny values.
  HeatmapStack channel = PointMass(50, 50, 25, 25);
  Pcg32 rng(26);
  const double mass = 1.0;
  for (int i = 0; i < 25; ++i) {  // 1% of 2500 pixels
    const int x = static_cast<int>(rng.UniformBelow(50));
    const int y = static_cast<int>(rng.UniformBelow(50));
    if (x == 25 && y == 25) continue;
    channel.At(0, y, x) = static_cast<float>(mass / 100.0 * rng.UniformDouble());
  }
  channel.normalized = false;
  const auto decoded = DecodeExpectation(NormalizeChannels(channel));
  const double expectation_move = (decoded.coords[0].coords - Eigen::Vector2d(25, 25)).norm();

  // A single super-maximal outlier at the far corner flips argmax entirely.
  HeatmapStack spiked = PointMass(50, 50, 25, 25);
  spiked.At(0, 49, 49) = 2.0f;
  const double argmax_move =
      (DecodeArgmax(spiked).coords[0].coords - Eigen::Vector2d(25, 25)).norm();

  CHECK(expectation_move < argmax_move);
}

TEST_CASE("rhmp round trip is bit exact") {
  Pcg32 rng(27);
  const auto stack = RandomDistribution(rng, 3, 9, 13);
  const std::string path =
      (std::filesystem::temp_directory_path() / "rope_hm_test.rhmp").string();
  SaveRhmp(stack, path);
  const auto loaded = LoadRhmp(path);
  CHECK(loaded.width == stack.width);
  CHECK(loaded.height == stack.height);
  CHECK(loaded.channels == stack.channels);
  CHECK(loaded.normalized == stack.normalized);
  REQUIRE(loaded.values.size() == stack.values.size());
  for (size_t i = 0; i < stack.values.size(); ++i)
    CHECK(loaded.values[i] == stack.values[i]);
  std::filesystem::remove(path);
}
