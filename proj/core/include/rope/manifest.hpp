#pragma once

#include <map>
#include <string>
#include <vector>

#include "rope/geometry.hpp"
#include "rope/oba.hpp"
#include "rope/vendor_json_fwd.hpp"

namespace rope {

// Dataset object entry. A cloud comes either from a builtin generator
// ("cube", "icosahedron", "blob") or an ASCII PLY file.
struct ObjectSpec {
  std::string id;
  std::string builtin;   // empty when ply_path is set
  std::string ply_path;  // relative to the manifest directory
  uint64_t cloud_seed = 0;
  bool symmetric = false;
  double diameter_mm = 0.0;
  int n_landmarks = 11;
};

struct SceneRecord {
  std::string image_id;
  std::string object_id;
  Pose gt_pose;
  CameraIntrinsics intrinsics;
  BBox bbox;
  // level name ("low"/"medium"/"high") -> RHMP path relative to manifest dir
  std::map<std::string, std::string> heatmap_paths;
};

struct Manifest {
  std::vector<ObjectSpec> objects;
  std::vector<SceneRecord> scenes;
};

// Per-image pipeline output.
struct Prediction {
  std::string image_id;
  bool pose_valid = false;
  Pose pose;
  std::vector<Landmark2D> landmarks_high;
  std::vector<Landmark2D> landmarks_medium;
  bool fallback_used = false;
  int inliers = 0;
  double mean_reproj_error = 0.0;
};

nlohmann::json PoseToJson(const Pose& pose);  // rotation row-major 9, translation 3
Pose PoseFromJson(const nlohmann::json& j);
nlohmann::json IntrinsicsToJson(const CameraIntrinsics& intr);
CameraIntrinsics IntrinsicsFromJson(const nlohmann::json& j);

void SaveManifest(const Manifest& manifest, const std::string& path);
Manifest LoadManifest(const std::string& path);

void SavePredictions(const std::vector<Prediction>& predictions, const std::string& path);
std::vector<Prediction> LoadPredictions(const std::string& path);

}  // namespace rope
