#pragma once

#include <string>
#include <vector>

#include "rope/manifest.hpp"
#include "rope/metrics.hpp"

namespace rope {

struct ImageRow {
  std::string image_id;
  std::string object_id;
  bool has_prediction = false;
  double distance_mm = 0.0;  // +inf for missing/invalid predictions
  bool correct = false;
  bool fallback_used = false;
  int inliers = 0;
  double mean_r = 0.0;  // NaN when no prediction
  double mean_c = 0.0;
};

struct ObjectSummary {
  std::string id;
  int n_scenes = 0;
  double pass_rate_pct = 0.0;
  double auc_pct = 0.0;
  std::vector<double> distances_mm;
};

struct EvaluationReport {
  std::vector<ImageRow> rows;  // manifest scene order
  std::vector<ObjectSummary> per_object;
  double pooled_pass_rate_pct = 0.0;
  double pooled_auc_pct = 0.0;
};

// ADD for asymmetric objects, ADD-S for symmetric ones, pass threshold 10%
// of the object diameter, AUC over [0, 100] mm. Missing predictions count as
// incorrect with distance +inf. Throws when a prediction names an unknown
// image or a scene names an unknown object.
EvaluationReport EvaluateDataset(const std::vector<Prediction>& predictions,
                                 const Manifest& manifest,
                                 const std::string& manifest_dir);

void SaveReportJson(const EvaluationReport& report, const std::string& path);
// One row per image plus header:
// image_id,object_id,distance_mm,correct,fallback_used,inliers,mean_r,mean_c
void SaveReportCsv(const EvaluationReport& report, const std::string& path);

}  // namespace rope
