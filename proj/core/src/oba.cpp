#include "rope/oba.hpp"

#include <stdexcept>

#include "rope/rng.hpp"

namespace rope {

ImageBuffer ApplyOba(const ImageBuffer& img, const BBox& bbox, const ObaConfig& cfg) {
  if (!bbox.ValidFor(img.width, img.height))
    throw std::invalid_argument("bbox outside image bounds");
  if (cfg.grid_rows < 1 || cfg.grid_cols < 1)
    throw std::invalid_argument("grid dimensions must be >= 1");
  if (cfg.p_occlude < 0.0 || cfg.p_occlude > 1.0 || cfg.p_noise_vs_patch < 0.0 ||
      cfg.p_noise_vs_patch > 1.0)
    throw std::invalid_argument("probabilities must lie in [0,1]");

  ImageBuffer out = ImageBuffer::Zero(img.width, img.height);
  for (int y = bbox.y0; y < bbox.y1; ++y)
    for (int x = bbox.x0; x < bbox.x1; ++x)
      for (int c = 0; c < 3; ++c) out.At(y, x, c) = img.At(y, x, c);

  Pcg32 rng(cfg.seed);
  const int base_h = bbox.Height() / cfg.grid_rows;
  const int base_w = bbox.Width() / cfg.grid_cols;

  for (int gr = 0; gr < cfg.grid_rows; ++gr) {
    for (int gc = 0; gc < cfg.grid_cols; ++gc) {
      const int py0 = bbox.y0 + gr * base_h;
      const int px0 = bbox.x0 + gc * base_w;
      // Last row/col absorb the remainder.
      const int py1 = (gr == cfg.grid_rows - 1) ? bbox.y1 : py0 + base_h;
      const int px1 = (gc == cfg.grid_cols - 1) ? bbox.x1 : px0 + base_w;
      const int ph = py1 - py0;
      const int pw = px1 - px0;
      if (ph <= 0 || pw <= 0) continue;

      if (rng.UniformDouble() >= cfg.p_occlude) continue;
      const bool noise = rng.UniformDouble() < cfg.p_noise_vs_patch;
      if (noise) {
        for (int y = py0; y < py1; ++y)
          for (int x = px0; x < px1; ++x)
            for (int c = 0; c < 3; ++c)
              out.At(y, x, c) = static_cast<uint8_t>(rng.UniformBelow(256));
      } else {
        const int sx = static_cast<int>(rng.UniformBelow(static_cast<uint32_t>(img.width - pw + 1)));
        const int sy = static_cast<int>(rng.UniformBelow(static_cast<uint32_t>(img.height - ph + 1)));
        for (int y = 0; y < ph; ++y)
          for (int x = 0; x < pw; ++x)
            for (int c = 0; c < 3; ++c)
              out.At(py0 + y, px0 + x, c) = img.At(sy + y, sx + x, c);
      }
    }
  }
  return out;
}

AugmentedBatch ExtendBatch(const std::vector<ImageBuffer>& images,
                           const std::vector<BBox>& bboxes,
                           const std::vector<std::shared_ptr<const nlohmann::json>>& labels,
                           const ObaConfig& cfg) {
  if (images.size() != bboxes.size() || images.size() != labels.size())
    throw std::invalid_argument("images, bboxes and labels must have equal length");

  const size_t n = images.size();
  AugmentedBatch batch;
  batch.images.reserve(2 * n);
  batch.labels.reserve(2 * n);
  for (size_t i = 0; i < n; ++i) {
    batch.images.push_back(images[i]);
    batch.labels.push_back(labels[i]);
  }
  for (size_t i = 0; i < n; ++i) {
    ObaConfig per = cfg;
    per.seed = cfg.seed ^ static_cast<uint64_t>(i);
    batch.images.push_back(ApplyOba(images[i], bboxes[i], per));
    batch.labels.push_back(labels[i]);  // shared with image i
  }
  return batch;
}

}  // namespace rope
