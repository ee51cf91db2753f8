#pragma once

#include <string>
#include <vector>

#include "rope/filter.hpp"
#include "rope/heatmap.hpp"
#include "rope/manifest.hpp"
#include "rope/pnp.hpp"

namespace rope {

struct PipelineOptions {
  bool no_filter = false;         // pass every landmark to PnP
  bool argmax_decode = false;     // argmax instead of spatial expectation
  bool single_precision = false;  // high head only; verification degenerates
  FilterConfig filter;
  RansacConfig ransac;
};

// decode (high + medium) -> verification filter -> RANSAC-PnP, for one image.
Prediction RunScenePipeline(const std::string& image_id, const HeatmapStack& high,
                            const HeatmapStack& medium,
                            const std::vector<Landmark3D>& landmarks3d,
                            const CameraIntrinsics& intr, const PipelineOptions& opts);

}  // namespace rope
