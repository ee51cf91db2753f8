#include "rope/evaluate.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <map>

#include "rope/synth.hpp"

namespace rope {

EvaluationReport EvaluateDataset(const std::vector<Prediction>& predictions,
                                 const Manifest& manifest,
                                 const std::string& manifest_dir) {
  std::map<std::string, const ObjectSpec*> objects;
  for (const auto& obj : manifest.objects) objects[obj.id] = &obj;

  std::map<std::string, const Prediction*> by_image;
  std::vector<std::string> unknown;
  {
    std::map<std::string, bool> scene_ids;
    for (const auto& s : manifest.scenes) scene_ids[s.image_id] = true;
    for (const auto& p : predictions) {
      if (!scene_ids.count(p.image_id)) unknown.push_back(p.image_id);
      by_image[p.image_id] = &p;
    }
  }
  if (!unknown.empty()) {
    std::string msg = "predictions reference unknown image ids:";
    for (const auto& id : unknown) msg += " " + id;
    throw std::runtime_error(msg);
  }

  std::map<std::string, PointCloud> clouds;
  std::map<std::string, std::vector<Landmark3D>> landmarks;
  const auto object_data = [&](const std::string& id) -> const ObjectSpec& {
    const auto it = objects.find(id);
    if (it == objects.end()) throw std::runtime_error("unknown object id: " + id);
    if (!clouds.count(id)) {
      clouds[id] = BuildObjectCloud(*it->second, manifest_dir);
      landmarks[id] = FpsSelect(clouds[id], it->second->n_landmarks);
    }
    return *it->second;
  };

  EvaluationReport report;
  std::map<std::string, ObjectSummary> summaries;
  int pooled_correct = 0;
  std::vector<double> pooled_distances;

  for (const auto& scene : manifest.scenes) {
    const ObjectSpec& obj = object_data(scene.object_id);
    const PointCloud& cloud = clouds[scene.object_id];

    ImageRow row;
    row.image_id = scene.image_id;
    row.object_id = scene.object_id;

    const auto pit = by_image.find(scene.image_id);
    const Prediction* pred = pit == by_image.end() ? nullptr : pit->second;
    if (pred == nullptr || !pred->pose_valid) {
      row.has_prediction = false;
      row.distance_mm = std::numeric_limits<double>::infinity();
      row.mean_r = row.mean_c = std::numeric_limits<double>::quiet_NaN();
      if (pred != nullptr) {
        row.fallback_used = pred->fallback_used;
        row.inliers = pred->inliers;
      }
    } else {
      row.has_prediction = true;
      const PoseDistance dist = obj.symmetric
                                    ? AddsDistance(pred->pose, scene.gt_pose, cloud)
                                    : AddDistance(pred->pose, scene.gt_pose, cloud);
      row.distance_mm = dist.value;
      row.correct = PoseCorrect(dist, obj.diameter_mm);
      row.fallback_used = pred->fallback_used;
      row.inliers = pred->inliers;

      if (pred->landmarks_high.size() == landmarks[scene.object_id].size()) {
        std::vector<Eigen::Vector3d> pts;
        for (const auto& lm : landmarks[scene.object_id]) pts.push_back(lm.coords);
        const auto projected = Project(pts, scene.gt_pose, scene.intrinsics);
        std::vector<Landmark2D> gt2d;
        for (size_t i = 0; i < projected.size(); ++i)
          gt2d.push_back({static_cast<int>(i), projected[i]});
        const CoherenceReport coh = Coherence(pred->landmarks_high, gt2d);
        row.mean_r = coh.mean_r;
        row.mean_c = coh.mean_c;
      } else {
        row.mean_r = row.mean_c = std::numeric_limits<double>::quiet_NaN();
      }
    }

    ObjectSummary& summary = summaries[scene.object_id];
    summary.id = scene.object_id;
    summary.n_scenes += 1;
    summary.distances_mm.push_back(row.distance_mm);
    if (row.correct) summary.pass_rate_pct += 1.0;  // counts for now

    pooled_distances.push_back(row.distance_mm);
    if (row.correct) ++pooled_correct;
    report.rows.push_back(row);
  }

  for (auto& [id, summary] : summaries) {
    summary.pass_rate_pct = 100.0 * summary.pass_rate_pct / summary.n_scenes;
    summary.auc_pct = 100.0 * Auc(summary.distances_mm);
    report.per_object.push_back(summary);
  }
  if (!pooled_distances.empty()) {
    report.pooled_pass_rate_pct =
        100.0 * pooled_correct / static_cast<double>(pooled_distances.size());
    report.pooled_auc_pct = 100.0 * Auc(pooled_distances);
  }
  return report;
}

void SaveReportJson(const EvaluationReport& report, const std::string& path) {
  nlohmann::json j;
  j["pooled"] = {{"pass_rate_pct", report.pooled_pass_rate_pct},
                 {"auc_pct", report.pooled_auc_pct},
                 {"n_scenes", report.rows.size()}};
  j["per_object"] = nlohmann::json::array();
  for (const auto& s : report.per_object)
    j["per_object"].push_back({{"id", s.id},
                               {"n_scenes", s.n_scenes},
                               {"pass_rate_pct", s.pass_rate_pct},
                               {"auc_pct", s.auc_pct}});
  j["images"] = nlohmann::json::array();
  for (const auto& r : report.rows) {
    nlohmann::json row = {{"image_id", r.image_id},
                          {"object_id", r.object_id},
                          {"has_prediction", r.has_prediction},
                          {"correct", r.correct},
                          {"fallback_used", r.fallback_used},
                          {"inliers", r.inliers}};
    row["distance_mm"] =
        std::isfinite(r.distance_mm) ? nlohmann::json(r.distance_mm) : nlohmann::json("inf");
    if (std::isfinite(r.mean_r)) {
      row["mean_r"] = r.mean_r;
      row["mean_c"] = r.mean_c;
    }
    j["images"].push_back(row);
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write report: " + path);
  out << j.dump(2) << "\n";
}

void SaveReportCsv(const EvaluationReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write report: " + path);
  out << "image_id,object_id,distance_mm,correct,fallback_used,inliers,mean_r,mean_c\n";
  out.precision(9);
  for (const auto& r : report.rows) {
    out << r.image_id << "," << r.object_id << ",";
    if (std::isfinite(r.distance_mm))
      out << r.distance_mm;
    else
      out << "inf";
    out << "," << (r.correct ? 1 : 0) << "," << (r.fallback_used ? 1 : 0) << ","
        << r.inliers << ",";
    if (std::isfinite(r.mean_r))
      out << r.mean_r << "," << r.mean_c;
    else
      out << ",";
    out << "\n";
  }
}

}  // namespace rope
