#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "vendor_json_fwd.hpp"

namespace rope {

// 8-bit RGB, row-major, interleaved channels.
struct ImageBuffer {
  int width = 0;
  int height = 0;
  std::vector<uint8_t> data;

  static ImageBuffer Zero(int width, int height) {
    return {width, height, std::vector<uint8_t>(static_cast<size_t>(width) * height * 3, 0)};
  }
  uint8_t At(int y, int x, int c) const {
    return data[(static_cast<size_t>(y) * width + x) * 3 + c];
  }
  uint8_t& At(int y, int x, int c) {
    return data[(static_cast<size_t>(y) * width + x) * 3 + c];
  }
};

// Pixel bbox, [x0,x1) x [y0,y1).
struct BBox {
  int x0 = 0, y0 = 0, x1 = 0, y1 = 0;
  int Width() const { return x1 - x0; }
  int Height() const { return y1 - y0; }
  bool ValidFor(int width, int height) const {
    return 0 <= x0 && x0 < x1 && x1 <= width && 0 <= y0 && y0 < y1 && y1 <= height;
  }
};

struct ObaConfig {
  int grid_rows = 4;
  int grid_cols = 4;
  double p_occlude = 0.5;
  double p_noise_vs_patch = 0.5;
  uint64_t seed = 0;
};

// Patch-wise occlusion inside the bbox plus blackout of everything outside.
//
// The bbox is split into grid_rows x grid_cols patches (last row/col absorb
// remainder pixels). Patches are visited row-major; per patch the draw order
// is: occlude coin, mode coin, then either noise bytes (row-major, RGB
// interleaved) or the source top-left (x then y, uniform over positions that
// keep the patch fully inside the image). Patch sources are read from the
// unmodified input. RNG is Pcg32 seeded with cfg.seed.
ImageBuffer ApplyOba(const ImageBuffer& img, const BBox& bbox, const ObaConfig& cfg);

struct AugmentedBatch {
  std::vector<ImageBuffer> images;  // originals then OBA copies, length 2N
  std::vector<std::shared_ptr<const nlohmann::json>> labels;  // image i and i+N alias
};

// First N outputs are the inputs unmodified; second N are ApplyOba results
// with per-image seed = cfg.seed ^ i. Throws on length mismatch.
AugmentedBatch ExtendBatch(const std::vector<ImageBuffer>& images,
                           const std::vector<BBox>& bboxes,
                           const std::vector<std::shared_ptr<const nlohmann::json>>& labels,
                           const ObaConfig& cfg);

ImageBuffer LoadPng(const std::string& path);
void SavePng(const ImageBuffer& img, const std::string& path);

}  // namespace rope
