#include <doctest.h>

#include <filesystem>

#include "rope/oba.hpp"
#include "rope/rng.hpp"

using namespace rope;

namespace {

ImageBuffer RandomImage(Pcg32& rng, int w, int h) {
  ImageBuffer img = ImageBuffer::Zero(w, h);
  for (auto& b : img.data) b = static_cast<uint8_t>(rng.UniformBelow(256));
  return img;
}

}  // namespace

TEST_CASE("p_occlude = 0 keeps the bbox interior and blacks out the rest") {
  Pcg32 rng(31);
  const ImageBuffer img = RandomImage(rng, 40, 30);
  const BBox bbox{8, 5, 30, 25};
  ObaConfig cfg;
  cfg.p_occlude = 0.0;
  const ImageBuffer out = ApplyOba(img, bbox, cfg);
  for (int y = 0; y < 30; ++y)
    for (int x = 0; x < 40; ++x)
      for (int c = 0; c < 3; ++c) {
        const bool inside = x >= 8 && x < 30 && y >= 5 && y < 25;
        CHECK(out.At(y, x, c) == (inside ? img.At(y, x, c) : 0));
      }
}

TEST_CASE("bbox covering the whole image with p = 0 is identity") {
  Pcg32 rng(32);
  const ImageBuffer img = RandomImage(rng, 16, 16);
  ObaConfig cfg;
  cfg.p_occlude = 0.0;
  const ImageBuffer out = ApplyOba(img, {0, 0, 16, 16}, cfg);
  CHECK(out.data == img.data);
}

TEST_CASE("forced noise occlusion changes every patch") {
  Pcg32 rng(33);
  const ImageBuffer img = RandomImage(rng, 48, 48);
  const BBox bbox{0, 0, 48, 48};
  ObaConfig cfg;
  cfg.p_occlude = 1.0;
  cfg.p_noise_vs_patch = 1.0;
  cfg.seed = 7;
  const ImageBuffer out = ApplyOba(img, bbox, cfg);
  for (int gr = 0; gr < 4; ++gr)
    for (int gc = 0; gc < 4; ++gc) {
      int diff = 0;
      for (int y = gr * 12; y < (gr + 1) * 12; ++y)
        for (int x = gc * 12; x < (gc + 1) * 12; ++x)
          for (int c = 0; c < 3; ++c) diff += out.At(y, x, c) != img.At(y, x, c);
      CHECK(diff > 0);
    }
}

TEST_CASE("determinism: identical inputs give bit-identical output") {
  Pcg32 rng(34);
  const ImageBuffer img = RandomImage(rng, 33, 27);
  const BBox bbox{3, 2, 31, 26};
  ObaConfig cfg;
  cfg.seed = 99;
  const ImageBuffer a = ApplyOba(img, bbox, cfg);
  const ImageBuffer b = ApplyOba(img, bbox, cfg);
  CHECK(a.data == b.data);
  cfg.seed = 100;
  const ImageBuffer c = ApplyOba(img, bbox, cfg);
  CHECK(a.data != c.data);
}

TEST_CASE("empirical occlusion rate sits in the binomial confidence band") {
  Pcg32 rng(35);
  const ImageBuffer img = RandomImage(rng, 64, 64);
  const BBox bbox{0, 0, 64, 64};
  int occluded = 0;
  const int seeds = 1000;
  const int patches = 16;
  for (int s = 0; s < seeds; ++s) {
    ObaConfig cfg;
    cfg.seed = static_cast<uint64_t>(s);
    cfg.p_noise_vs_patch = 1.0;
    const ImageBuffer out = ApplyOba(img, bbox, cfg);
    for (int gr = 0; gr < 4; ++gr)
      for (int gc = 0; gc < 4; ++gc) {
        bool changed = false;
        for (int y = gr * 16; y < (gr + 1) * 16 && !changed; ++y)
          for (int x = gc * 16; x < (gc + 1) * 16 && !changed; ++x)
            for (int c = 0; c < 3; ++c) changed = changed || out.At(y, x, c) != img.At(y, x, c);
        occluded += changed;
      }
  }
  const double n = static_cast<double>(seeds * patches);
  const double rate = occluded / n;
  const double half_width = 2.576 * std::sqrt(0.25 / n);  // 99% CI around 0.5
  CHECK(rate > 0.5 - half_width);
  CHECK(rate < 0.5 + half_width);
}

TEST_CASE("remainder pixels are absorbed by the last row and column") {
  Pcg32 rng(36);
  const ImageBuffer img = RandomImage(rng, 37, 23);  // not divisible by 4
  const BBox bbox{1, 1, 36, 22};
  ObaConfig cfg;
  cfg.p_occlude = 1.0;
  cfg.p_noise_vs_patch = 1.0;
  cfg.seed = 5;
  const ImageBuffer out = ApplyOba(img, bbox, cfg);
  // Outside still black, no crash on odd sizes.
  for (int x = 0; x < 37; ++x)
    for (int c = 0; c < 3; ++c) CHECK(out.At(0, x, c) == 0);
}

TEST_CASE("extend batch doubles the batch and aliases labels per pair") {
  Pcg32 rng(37);
  std::vector<ImageBuffer> images;
  std::vector<BBox> bboxes;
  std::vector<std::shared_ptr<const nlohmann::json>> labels;
  for (int i = 0; i < 8; ++i) {
    images.push_back(RandomImage(rng, 20, 20));
    bboxes.push_back({2, 2, 18, 18});
    labels.push_back(std::make_shared<const nlohmann::json>(nlohmann::json{{"id", i}}));
  }
  ObaConfig cfg;
  cfg.seed = 1234;
  cfg.p_occlude = 0.0;
  const AugmentedBatch batch = ExtendBatch(images, bboxes, labels, cfg);
  REQUIRE(batch.images.size() == 16);
  for (int i = 0; i < 8; ++i) {
    CHECK(batch.labels[i].get() == batch.labels[i + 8].get());
    CHECK(batch.images[i].data == images[i].data);
    // p = 0: second half differs only outside the bbox (blackout)
    for (int y = 2; y < 18; ++y)
      for (int x = 2; x < 18; ++x)
        for (int c = 0; c < 3; ++c)
          CHECK(batch.images[i + 8].At(y, x, c) == images[i].At(y, x, c));
  }

  const AugmentedBatch again = ExtendBatch(images, bboxes, labels, cfg);
  for (size_t i = 0; i < batch.images.size(); ++i)
    CHECK(batch.images[i].data == again.images[i].data);

  CHECK_THROWS_AS(ExtendBatch(images, {bboxes[0]}, labels, cfg), std::invalid_argument);
}

TEST_CASE("png round trip") {
  Pcg32 rng(38);
  const ImageBuffer img = RandomImage(rng, 21, 17);
  const std::string path =
      (std::filesystem::temp_directory_path() / "rope_oba_test.png").string();
  SavePng(img, path);
  const ImageBuffer loaded = LoadPng(path);
  CHECK(loaded.width == img.width);
  CHECK(loaded.height == img.height);
  CHECK(loaded.data == img.data);
  std::filesystem::remove(path);
}
