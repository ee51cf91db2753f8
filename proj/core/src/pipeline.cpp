#include "rope/pipeline.hpp"

namespace rope {

Prediction RunScenePipeline(const std::string& image_id, const HeatmapStack& high,
                            const HeatmapStack& medium,
                            const std::vector<Landmark3D>& landmarks3d,
                            const CameraIntrinsics& intr, const PipelineOptions& opts) {
  const auto decode = [&](const HeatmapStack& stack) {
    return opts.argmax_decode ? DecodeArgmax(stack) : DecodeExpectation(stack);
  };

  DecodedLandmarks decoded_high = decode(high);
  decoded_high.level = PrecisionLevel::High();
  DecodedLandmarks decoded_medium = opts.single_precision ? decoded_high : decode(medium);
  decoded_medium.level = PrecisionLevel::Medium();

  Prediction pred;
  pred.image_id = image_id;
  pred.landmarks_high = decoded_high.coords;
  pred.landmarks_medium = decoded_medium.coords;

  PnpResult result;
  if (opts.no_filter) {
    std::vector<Correspondence> corr;
    for (size_t i = 0; i < landmarks3d.size(); ++i)
      corr.push_back({landmarks3d[i].index, decoded_high.coords[i].coords,
                      landmarks3d[i].coords});
    result = RansacPnp(corr, intr, opts.ransac);
  } else {
    const FilteredCorrespondences filtered =
        FilterLandmarks(decoded_high, decoded_medium, landmarks3d, opts.filter);
    pred.fallback_used = filtered.fallback_used;
    result = RansacPnp(filtered, intr, opts.ransac);
  }

  pred.pose_valid = result.valid;
  pred.pose = result.pose;
  pred.inliers = static_cast<int>(result.inlier_indices.size());
  pred.mean_reproj_error = result.mean_reproj_error;
  return pred;
}

}  // namespace rope
