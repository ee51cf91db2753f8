#pragma once

#include <vector>

#include "rope/geometry.hpp"
#include "rope/heatmap.hpp"

namespace rope {

struct FilterConfig {
  double epsilon = 1.0;                  // px, verification threshold
  static constexpr int kMinPoints = 4;   // PnP minimum
};

struct FilteredCorrespondences {
  std::vector<std::pair<Landmark2D, Landmark3D>> pairs;  // high-precision 2D coords
  std::vector<int> kept_indices;
  bool fallback_used = false;
  std::vector<double> disagreement;  // ||x_i - x_i^m||_2 per landmark, px
};

// Keep landmark i iff the high- and medium-precision predictions agree within
// epsilon. If fewer than 4 survive, keep instead the 4 indices with smallest
// disagreement (ties by lower index) and set fallback_used.
FilteredCorrespondences FilterLandmarks(const DecodedLandmarks& high,
                                        const DecodedLandmarks& medium,
                                        const std::vector<Landmark3D>& model_points,
                                        const FilterConfig& cfg);

}  // namespace rope
