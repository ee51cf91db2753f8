#include "rope/manifest.hpp"

#include <fstream>

namespace rope {

namespace {

nlohmann::json Landmarks2dToJson(const std::vector<Landmark2D>& landmarks) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& lm : landmarks)
    arr.push_back({{"index", lm.index}, {"x", lm.coords.x()}, {"y", lm.coords.y()}});
  return arr;
}

std::vector<Landmark2D> Landmarks2dFromJson(const nlohmann::json& arr) {
  std::vector<Landmark2D> out;
  for (const auto& j : arr)
    out.push_back({j.at("index").get<int>(),
                   {j.at("x").get<double>(), j.at("y").get<double>()}});
  return out;
}

}  // namespace

nlohmann::json PoseToJson(const Pose& pose) {
  nlohmann::json rot = nlohmann::json::array();
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) rot.push_back(pose.rotation(r, c));
  return {{"rotation", rot},
          {"translation", {pose.translation.x(), pose.translation.y(), pose.translation.z()}}};
}

Pose PoseFromJson(const nlohmann::json& j) {
  Pose pose;
  const auto& rot = j.at("rotation");
  if (rot.size() != 9) throw std::runtime_error("pose rotation must have 9 entries");
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) pose.rotation(r, c) = rot[r * 3 + c].get<double>();
  const auto& t = j.at("translation");
  pose.translation = {t.at(0).get<double>(), t.at(1).get<double>(), t.at(2).get<double>()};
  return pose;
}

nlohmann::json IntrinsicsToJson(const CameraIntrinsics& intr) {
  return {{"fx", intr.fx}, {"fy", intr.fy}, {"cx", intr.cx}, {"cy", intr.cy}};
}

CameraIntrinsics IntrinsicsFromJson(const nlohmann::json& j) {
  return {j.at("fx").get<double>(), j.at("fy").get<double>(), j.at("cx").get<double>(),
          j.at("cy").get<double>()};
}

void SaveManifest(const Manifest& manifest, const std::string& path) {
  nlohmann::json j;
  j["coordinate_convention"] =
      "2D: pixels, origin at top-left pixel center, +x right, +y down; 3D: millimetres";
  j["objects"] = nlohmann::json::array();
  for (const auto& obj : manifest.objects) {
    nlohmann::json o = {{"id", obj.id},
                        {"symmetric", obj.symmetric},
                        {"diameter_mm", obj.diameter_mm},
                        {"n_landmarks", obj.n_landmarks}};
    if (!obj.builtin.empty()) {
      o["builtin"] = obj.builtin;
      o["cloud_seed"] = obj.cloud_seed;
    } else {
      o["ply_path"] = obj.ply_path;
    }
    j["objects"].push_back(o);
  }
  j["scenes"] = nlohmann::json::array();
  for (const auto& s : manifest.scenes) {
    j["scenes"].push_back(
        {{"image_id", s.image_id},
         {"object_id", s.object_id},
         {"gt_pose", PoseToJson(s.gt_pose)},
         {"intrinsics", IntrinsicsToJson(s.intrinsics)},
         {"bbox", {s.bbox.x0, s.bbox.y0, s.bbox.x1, s.bbox.y1}},
         {"heatmap_paths", s.heatmap_paths}});
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write manifest: " + path);
  out << j.dump(2) << "\n";
}

Manifest LoadManifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open manifest: " + path);
  nlohmann::json j;
  in >> j;

  Manifest manifest;
  for (const auto& o : j.at("objects")) {
    ObjectSpec obj;
    obj.id = o.at("id").get<std::string>();
    obj.symmetric = o.at("symmetric").get<bool>();
    obj.diameter_mm = o.at("diameter_mm").get<double>();
    obj.n_landmarks = o.at("n_landmarks").get<int>();
    if (o.contains("builtin")) {
      obj.builtin = o.at("builtin").get<std::string>();
      obj.cloud_seed = o.value("cloud_seed", 0ULL);
    } else {
      obj.ply_path = o.at("ply_path").get<std::string>();
    }
    manifest.objects.push_back(obj);
  }
  for (const auto& s : j.at("scenes")) {
    SceneRecord rec;
    rec.image_id = s.at("image_id").get<std::string>();
    rec.object_id = s.at("object_id").get<std::string>();
    rec.gt_pose = PoseFromJson(s.at("gt_pose"));
    rec.intrinsics = IntrinsicsFromJson(s.at("intrinsics"));
    const auto& b = s.at("bbox");
    rec.bbox = {b.at(0).get<int>(), b.at(1).get<int>(), b.at(2).get<int>(),
                b.at(3).get<int>()};
    rec.heatmap_paths =
        s.at("heatmap_paths").get<std::map<std::string, std::string>>();
    manifest.scenes.push_back(rec);
  }
  return manifest;
}

void SavePredictions(const std::vector<Prediction>& predictions, const std::string& path) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& p : predictions) {
    arr.push_back({{"image_id", p.image_id},
                   {"pose_valid", p.pose_valid},
                   {"pose", PoseToJson(p.pose)},
                   {"landmarks_high", Landmarks2dToJson(p.landmarks_high)},
                   {"landmarks_medium", Landmarks2dToJson(p.landmarks_medium)},
                   {"fallback_used", p.fallback_used},
                   {"inliers", p.inliers},
                   {"mean_reproj_error", p.mean_reproj_error}});
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write predictions: " + path);
  out << arr.dump(2) << "\n";
}

std::vector<Prediction> LoadPredictions(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open predictions: " + path);
  nlohmann::json arr;
  in >> arr;
  std::vector<Prediction> out;
  for (const auto& j : arr) {
    Prediction p;
    p.image_id = j.at("image_id").get<std::string>();
    p.pose_valid = j.at("pose_valid").get<bool>();
    p.pose = PoseFromJson(j.at("pose"));
    p.landmarks_high = Landmarks2dFromJson(j.at("landmarks_high"));
    p.landmarks_medium = Landmarks2dFromJson(j.at("landmarks_medium"));
    p.fallback_used = j.at("fallback_used").get<bool>();
    p.inliers = j.at("inliers").get<int>();
    p.mean_reproj_error = j.at("mean_reproj_error").get<double>();
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace rope
