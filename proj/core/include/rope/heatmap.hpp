#pragma once

#include <string>
#include <vector>

#include "rope/geometry.hpp"

namespace rope {

// The three canonical supervision precisions, sigma in pixels.
struct PrecisionLevel {
  enum class Name { kLow, kMedium, kHigh };
  Name name = Name::kHigh;
  double sigma = 1.5;

  static PrecisionLevel Low() { return {Name::kLow, 8.0}; }
  static PrecisionLevel Medium() { return {Name::kMedium, 3.0}; }
  static PrecisionLevel High() { return {Name::kHigh, 1.5}; }
};

// K-channel scalar field, channel-major then row-major. Values are float to
// match the on-disk format; all reductions accumulate in double.
struct HeatmapStack {
  int width = 0;
  int height = 0;
  int channels = 0;
  bool normalized = false;
  std::vector<float> values;

  float At(int k, int y, int x) const {
    return values[(static_cast<size_t>(k) * height + y) * width + x];
  }
  float& At(int k, int y, int x) {
    return values[(static_cast<size_t>(k) * height + y) * width + x];
  }
  size_t ChannelSize() const { return static_cast<size_t>(width) * height; }
};

struct DecodedLandmarks {
  PrecisionLevel level;
  std::vector<Landmark2D> coords;
  std::vector<double> peak_mass;  // max normalized value per channel, diagnostic
};

// One Gaussian channel per landmark, centred on the (possibly off-crop)
// landmark; each channel is renormalized over the visible grid to sum to 1.
HeatmapStack MakeGaussianStack(const std::vector<Landmark2D>& landmarks, int width,
                               int height, double sigma);

// Channel-wise softmax (max-shifted); output normalized.
HeatmapStack SoftmaxChannels(const HeatmapStack& stack);

// Sum-normalization for already non-negative stacks.
HeatmapStack NormalizeChannels(const HeatmapStack& stack);

// Mean over channels of JSD(p,q) = 0.5 KL(p||m) + 0.5 KL(q||m), m = (p+q)/2,
// natural log, 0*log0 = 0. Range [0, ln 2]. Throws on shape mismatch.
double JsdLoss(const HeatmapStack& pred, const HeatmapStack& gt);

// Per-channel probability-weighted mean pixel coordinate. Sum-normalizes
// first when the stack is not flagged normalized.
DecodedLandmarks DecodeExpectation(const HeatmapStack& stack);

// Per-channel argmax, ties broken by row-major first occurrence.
DecodedLandmarks DecodeArgmax(const HeatmapStack& stack);

// "RHMP" binary format: magic "RHMP", u8 version=1, u32le K, H, W,
// K*H*W f32le channel-major row-major, u8 normalized flag.
void SaveRhmp(const HeatmapStack& stack, const std::string& path);
HeatmapStack LoadRhmp(const std::string& path);

}  // namespace rope
