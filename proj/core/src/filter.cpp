#include "rope/filter.hpp"

#include <algorithm>
#include <numeric>

namespace rope {

FilteredCorrespondences FilterLandmarks(const DecodedLandmarks& high,
                                        const DecodedLandmarks& medium,
                                        const std::vector<Landmark3D>& model_points,
                                        const FilterConfig& cfg) {
  const size_t k = high.coords.size();
  if (k < FilterConfig::kMinPoints)
    throw std::invalid_argument("need at least 4 landmarks");
  if (medium.coords.size() != k || model_points.size() != k)
    throw std::invalid_argument("landmark set length mismatch");
  for (size_t i = 0; i < k; ++i)
    if (high.coords[i].index != medium.coords[i].index ||
        high.coords[i].index != model_points[i].index)
      throw std::invalid_argument("landmark index mismatch");
  if (cfg.epsilon < 0.0) throw std::invalid_argument("epsilon must be >= 0");

  FilteredCorrespondences out;
  out.disagreement.resize(k);
  for (size_t i = 0; i < k; ++i)
    out.disagreement[i] = (high.coords[i].coords - medium.coords[i].coords).norm();

  for (size_t i = 0; i < k; ++i)
    if (out.disagreement[i] <= cfg.epsilon) out.kept_indices.push_back(static_cast<int>(i));

  if (out.kept_indices.size() < FilterConfig::kMinPoints) {
    out.fallback_used = true;
    std::vector<int> order(k);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return out.disagreement[a] < out.disagreement[b];
    });
    order.resize(FilterConfig::kMinPoints);
    std::sort(order.begin(), order.end());
    out.kept_indices = order;
  }

  for (int i : out.kept_indices)
    out.pairs.emplace_back(high.coords[i], model_points[i]);
  return out;
}

}  // namespace rope
