#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rope/geometry.hpp"
#include "rope/heatmap.hpp"
#include "rope/manifest.hpp"
#include "rope/oba.hpp"

namespace rope {

struct SceneConfig {
  // Cloud source: builtin name ("cube", "icosahedron", "blob") or a PLY path.
  std::string builtin = "blob";
  std::string ply_path;
  uint64_t cloud_seed = 42;

  int n_landmarks = 11;
  int image_width = 256;
  int image_height = 256;
  CameraIntrinsics intrinsics{300.0, 300.0, 127.5, 127.5};

  // Pose sampling: rotation uniform over SO(3) (Shoemake's uniform
  // quaternion), translation uniform in the box below.
  double translation_range_xy_mm = 40.0;
  double min_depth_mm = 500.0;
  double max_depth_mm = 800.0;

  // Require every landmark projection inside the image with margin
  // 4 * sigma_low; resampled up to 1000 times.
  bool in_frame = true;

  uint64_t seed = 0;
};

// Stand-in for a trained network's error distribution on occluded landmarks.
struct CorruptionConfig {
  double landmark_noise_sigma = 0.0;  // px, jitter on unoccluded channel centers
  double occluded_fraction = 0.0;     // fraction of landmark channels per image
  double occluded_shift = 0.0;        // px, magnitude of the occluded-center shift
  int distractor_blobs = 2;           // extra Gaussian blobs per occluded channel
  double flatten_factor = 0.3;        // multiplier on the occluded-channel peak
  bool decorrelate_medium = true;     // independent shift draws for the medium head
  uint64_t seed = 0;
};

struct SyntheticScene {
  PointCloud cloud;
  std::vector<Landmark3D> landmarks3d;
  Pose gt_pose;
  CameraIntrinsics intrinsics;
  std::vector<Landmark2D> gt_landmarks2d;
  BBox bbox;  // tight box around the projected cloud, padded 10%, clamped
  std::map<std::string, HeatmapStack> heatmaps;  // "low"/"medium"/"high", clean
  std::map<std::string, HeatmapStack> corrupted_heatmaps;  // empty until corrupted
  std::vector<int> occluded_indices;  // channels corrupted as occluded, ascending
};

// Builtin clouds. "blob": 200 points uniform in a 100 mm-radius sphere plus
// the 8 corners of a 100 mm cube (Pcg32 on cloud_seed); "cube": the 8
// corners; "icosahedron": 12 vertices, circumradius 100 mm.
PointCloud BuildCloud(const SceneConfig& cfg);
PointCloud BuildObjectCloud(const ObjectSpec& spec, const std::string& base_dir);

// Deterministic per (cfg, scene_seed). Landmarks via FpsSelect; heatmaps at
// sigma in {8, 3, 1.5} over the full image grid. Throws if 1000 pose draws
// all violate the in-frame constraint.
SyntheticScene GenerateScene(const SceneConfig& cfg, uint64_t scene_seed);

// Copies the scene and fills corrupted_heatmaps for the high and medium
// levels (the low level stays clean; it is unused at inference). See the
// implementation notes for the exact draw order.
SyntheticScene CorruptScene(const SyntheticScene& scene, const CorruptionConfig& cfg);

struct DatasetConfig {
  SceneConfig scene;
  int n_scenes = 10;
  std::optional<CorruptionConfig> corruption;
  std::string object_id = "obj0";
  bool symmetric = false;
};

// Writes manifest.json plus per-scene RHMP heatmap files under out_dir.
// Per-scene seed = scene.seed ^ scene index. Heatmap paths in the manifest
// point at the corrupted stacks when corruption is configured.
Manifest GenerateDataset(const DatasetConfig& cfg, const std::string& out_dir);

}  // namespace rope
