#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "rope/filter.hpp"
#include "rope/rng.hpp"

using namespace rope;

namespace {

DecodedLandmarks MakeDecoded(PrecisionLevel level,
                             const std::vector<Eigen::Vector2d>& coords) {
  DecodedLandmarks d;
  d.level = level;
  for (size_t i = 0; i < coords.size(); ++i)
    d.coords.push_back({static_cast<int>(i), coords[i]});
  d.peak_mass.assign(coords.size(), 1.0);
  return d;
}

std::vector<Landmark3D> ModelPoints(int k) {
  std::vector<Landmark3D> pts;
  for (int i = 0; i < k; ++i)
    pts.push_back({i, Eigen::Vector3d(i, 2.0 * i, 3.0 * i)});
  return pts;
}

}  // namespace

TEST_CASE("hand-worked disagreements: keep set, then fallback on shrink") {
  // Disagreements: 0.5, 0.9, 1.1, 2.0, 3.0 with epsilon 1 -> keep {0, 1},
  // fewer than 4 -> fallback takes the 4 smallest {0, 1, 2, 3}.
  const auto high = MakeDecoded(PrecisionLevel::High(),
                                {{10, 10}, {20, 20}, {30, 30}, {40, 40}, {50, 50}});
  const auto medium = MakeDecoded(
      PrecisionLevel::Medium(),
      {{10.5, 10}, {20, 20.9}, {30, 31.1}, {42, 40}, {50, 53}});
  const auto out = FilterLandmarks(high, medium, ModelPoints(5), {});

  REQUIRE(out.disagreement.size() == 5);
  CHECK(out.disagreement[0] == doctest::Approx(0.5));
  CHECK(out.disagreement[1] == doctest::Approx(0.9));
  CHECK(out.disagreement[2] == doctest::Approx(1.1));
  CHECK(out.disagreement[3] == doctest::Approx(2.0));
  CHECK(out.disagreement[4] == doctest::Approx(3.0));

  CHECK(out.fallback_used);
  CHECK(out.kept_indices == std::vector<int>{0, 1, 2, 3});
  REQUIRE(out.pairs.size() == 4);
  CHECK(out.pairs[0].first.coords == Eigen::Vector2d(10, 10));  // high coords kept
  CHECK(out.pairs[3].second.coords == Eigen::Vector3d(3, 6, 9));
}

TEST_CASE("no fallback when at least four survive") {
  const auto high = MakeDecoded(PrecisionLevel::High(),
                                {{0, 0}, {1, 1}, {2, 2}, {3, 3}, {4, 4}});
  const auto medium = MakeDecoded(PrecisionLevel::Medium(),
                                  {{0, 0}, {1, 1}, {2, 2}, {3, 3}, {4, 9}});
  const auto out = FilterLandmarks(high, medium, ModelPoints(5), {});
  CHECK_FALSE(out.fallback_used);
  CHECK(out.kept_indices == std::vector<int>{0, 1, 2, 3});
}

TEST_CASE("exactly four survivors does not trigger the fallback") {
  const auto high = MakeDecoded(PrecisionLevel::High(), {{0, 0}, {1, 1}, {2, 2}, {3, 3}});
  const auto medium = MakeDecoded(PrecisionLevel::Medium(),
                                  {{0, 0.5}, {1, 1.5}, {2, 2.5}, {3, 3.5}});
  const auto out = FilterLandmarks(high, medium, ModelPoints(4), {});
  CHECK_FALSE(out.fallback_used);
  CHECK(out.kept_indices.size() == 4);
}

TEST_CASE("boundary: disagreement exactly epsilon is kept") {
  const auto high = MakeDecoded(PrecisionLevel::High(), {{0, 0}, {1, 1}, {2, 2}, {3, 3}, {4, 4}});
  const auto medium = MakeDecoded(PrecisionLevel::Medium(),
                                  {{1, 0}, {1, 1}, {2, 2}, {3, 3}, {4, 4}});
  const auto out = FilterLandmarks(high, medium, ModelPoints(5), {});
  CHECK(std::find(out.kept_indices.begin(), out.kept_indices.end(), 0) !=
        out.kept_indices.end());
}

TEST_CASE("raising epsilon never removes previously kept landmarks") {
  Pcg32 rng(41);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Eigen::Vector2d> h, m;
    for (int i = 0; i < 12; ++i) {
      h.emplace_back(rng.UniformRange(0, 64), rng.UniformRange(0, 64));
      m.emplace_back(h.back().x() + rng.Normal() * 1.5, h.back().y() + rng.Normal() * 1.5);
    }
    const auto high = MakeDecoded(PrecisionLevel::High(), h);
    const auto medium = MakeDecoded(PrecisionLevel::Medium(), m);
    FilterConfig tight, loose;
    tight.epsilon = 1.0;
    loose.epsilon = 2.5;
    const auto a = FilterLandmarks(high, medium, ModelPoints(12), tight);
    const auto b = FilterLandmarks(high, medium, ModelPoints(12), loose);
    if (!a.fallback_used && !b.fallback_used)
      for (int idx : a.kept_indices)
        CHECK(std::find(b.kept_indices.begin(), b.kept_indices.end(), idx) !=
              b.kept_indices.end());
  }
}

TEST_CASE("fallback selection matches an exhaustive sort oracle") {
  Pcg32 rng(42);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Eigen::Vector2d> h, m;
    const int k = 4 + static_cast<int>(rng.UniformBelow(8));
    for (int i = 0; i < k; ++i) {
      h.emplace_back(rng.UniformRange(0, 64), rng.UniformRange(0, 64));
      // Large offsets so nearly everything fails the 1 px gate.
      m.emplace_back(h.back().x() + 3.0 + 5.0 * rng.UniformDouble(), h.back().y());
    }
    const auto high = MakeDecoded(PrecisionLevel::High(), h);
    const auto medium = MakeDecoded(PrecisionLevel::Medium(), m);
    const auto out = FilterLandmarks(high, medium, ModelPoints(k), {});
    REQUIRE(out.fallback_used);

    // Oracle: stable sort of (disagreement, index), first 4, ascending index.
    std::vector<int> order(k);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return out.disagreement[a] < out.disagreement[b];
    });
    std::vector<int> expect(order.begin(), order.begin() + 4);
    std::sort(expect.begin(), expect.end());
    CHECK(out.kept_indices == expect);
  }
}

TEST_CASE("error paths: too few landmarks and index mismatch") {
  const auto high3 = MakeDecoded(PrecisionLevel::High(), {{0, 0}, {1, 1}, {2, 2}});
  const auto medium3 = MakeDecoded(PrecisionLevel::Medium(), {{0, 0}, {1, 1}, {2, 2}});
  CHECK_THROWS_AS(FilterLandmarks(high3, medium3, ModelPoints(3), {}),
                  std::invalid_argument);

  const auto high = MakeDecoded(PrecisionLevel::High(), {{0, 0}, {1, 1}, {2, 2}, {3, 3}});
  const auto medium = MakeDecoded(PrecisionLevel::Medium(), {{0, 0}, {1, 1}, {2, 2}, {3, 3}});
  CHECK_THROWS_AS(FilterLandmarks(high, medium, ModelPoints(5), {}),
                  std::invalid_argument);
}
