#include "rope/synth.hpp"

#include <cmath>
#include <filesystem>

#include "rope/rng.hpp"

namespace rope {

namespace {

constexpr double kSigmaLow = 8.0;
constexpr double kSigmaMedium = 3.0;
constexpr double kSigmaHigh = 1.5;

PointCloud CubeCorners(double half_edge) {
  PointCloud cloud;
  for (int i = 0; i < 8; ++i)
    cloud.points.emplace_back((i & 1) ? half_edge : -half_edge,
                              (i & 2) ? half_edge : -half_edge,
                              (i & 4) ? half_edge : -half_edge);
  return cloud;
}

PointCloud Icosahedron(double circumradius) {
  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  const double scale = circumradius / std::sqrt(1.0 + phi * phi);
  PointCloud cloud;
  for (double s1 : {-1.0, 1.0})
    for (double s2 : {-1.0, 1.0}) {
      cloud.points.emplace_back(0.0, s1 * scale, s2 * phi * scale);
      cloud.points.emplace_back(s1 * scale, s2 * phi * scale, 0.0);
      cloud.points.emplace_back(s1 * phi * scale, 0.0, s2 * scale);
    }
  return cloud;
}

PointCloud BlobCloud(uint64_t seed) {
  // 200 points uniform in a 100 mm-radius sphere plus 100 mm-cube corners,
  // so FPS always has well-spread extreme points available.
  PointCloud cloud = CubeCorners(50.0);
  Pcg32 rng(seed);
  while (cloud.points.size() < 208) {
    const double x = rng.UniformRange(-100.0, 100.0);
    const double y = rng.UniformRange(-100.0, 100.0);
    const double z = rng.UniformRange(-100.0, 100.0);
    if (x * x + y * y + z * z <= 100.0 * 100.0) cloud.points.emplace_back(x, y, z);
  }
  return cloud;
}

PointCloud BuildBuiltin(const std::string& name, uint64_t seed) {
  if (name == "cube") return CubeCorners(50.0);
  if (name == "icosahedron") return Icosahedron(100.0);
  if (name == "blob") return BlobCloud(seed);
  throw std::invalid_argument("unknown builtin cloud: " + name);
}

// Shoemake's method: uniform rotation from three uniforms.
Eigen::Matrix3d UniformRotation(Pcg32& rng) {
  const double u1 = rng.UniformDouble();
  const double u2 = rng.UniformDouble();
  const double u3 = rng.UniformDouble();
  const double a = std::sqrt(1.0 - u1);
  const double b = std::sqrt(u1);
  const Eigen::Quaterniond q(a * std::sin(2.0 * M_PI * u2), a * std::cos(2.0 * M_PI * u2),
                             b * std::sin(2.0 * M_PI * u3), b * std::cos(2.0 * M_PI * u3));
  return q.normalized().toRotationMatrix();
}

// One channel of the corruption model, built over the full grid and
// sum-normalized. `floor_value` keeps flattened channels from collapsing to
// all-zero and models diffuse activation.
void FillCorruptedChannel(HeatmapStack* stack, int k, double sigma,
                          const Eigen::Vector2d& center, double peak_scale,
                          const std::vector<std::pair<Eigen::Vector2d, double>>& blobs,
                          double floor_value) {
  const double inv2s2 = 1.0 / (2.0 * sigma * sigma);
  double sum = 0.0;
  for (int y = 0; y < stack->height; ++y)
    for (int x = 0; x < stack->width; ++x) {
      double v = floor_value +
                 peak_scale * std::exp(-((x - center.x()) * (x - center.x()) +
                                         (y - center.y()) * (y - center.y())) *
                                       inv2s2);
      for (const auto& [pos, amp] : blobs)
        v += amp * std::exp(-((x - pos.x()) * (x - pos.x()) +
                              (y - pos.y()) * (y - pos.y())) *
                            inv2s2);
      stack->At(k, y, x) = static_cast<float>(v);
      sum += v;
    }
  const double inv = 1.0 / sum;
  for (int y = 0; y < stack->height; ++y)
    for (int x = 0; x < stack->width; ++x)
      stack->At(k, y, x) = static_cast<float>(stack->At(k, y, x) * inv);
}

}  // namespace

PointCloud BuildCloud(const SceneConfig& cfg) {
  if (!cfg.ply_path.empty()) return LoadPly(cfg.ply_path);
  return BuildBuiltin(cfg.builtin, cfg.cloud_seed);
}

PointCloud BuildObjectCloud(const ObjectSpec& spec, const std::string& base_dir) {
  PointCloud cloud;
  if (!spec.builtin.empty()) {
    cloud = BuildBuiltin(spec.builtin, spec.cloud_seed);
  } else {
    cloud = LoadPly((std::filesystem::path(base_dir) / spec.ply_path).string());
  }
  cloud.symmetric = spec.symmetric;
  return cloud;
}

SyntheticScene GenerateScene(const SceneConfig& cfg, uint64_t scene_seed) {
  SyntheticScene scene;
  scene.cloud = BuildCloud(cfg);
  scene.landmarks3d = FpsSelect(scene.cloud, cfg.n_landmarks);
  scene.intrinsics = cfg.intrinsics;

  std::vector<Eigen::Vector3d> landmark_points;
  for (const auto& lm : scene.landmarks3d) landmark_points.push_back(lm.coords);

  const double margin = cfg.in_frame ? 4.0 * kSigmaLow : 0.0;
  Pcg32 rng(scene_seed);
  bool found = false;
  for (int attempt = 0; attempt < 1000 && !found; ++attempt) {
    Pose pose;
    pose.rotation = UniformRotation(rng);
    pose.translation = {rng.UniformRange(-cfg.translation_range_xy_mm,
                                         cfg.translation_range_xy_mm),
                        rng.UniformRange(-cfg.translation_range_xy_mm,
                                         cfg.translation_range_xy_mm),
                        rng.UniformRange(cfg.min_depth_mm, cfg.max_depth_mm)};
    try {
      const auto projected = Project(landmark_points, pose, cfg.intrinsics);
      bool ok = true;
      for (const auto& px : projected)
        ok = ok && px.x() >= margin && px.x() <= cfg.image_width - 1 - margin &&
             px.y() >= margin && px.y() <= cfg.image_height - 1 - margin;
      if (!ok) continue;
      const auto cloud_px = Project(scene.cloud.points, pose, cfg.intrinsics);

      scene.gt_pose = pose;
      scene.gt_landmarks2d.clear();
      for (size_t i = 0; i < projected.size(); ++i)
        scene.gt_landmarks2d.push_back({static_cast<int>(i), projected[i]});

      double x0 = cloud_px[0].x(), x1 = x0, y0 = cloud_px[0].y(), y1 = y0;
      for (const auto& px : cloud_px) {
        x0 = std::min(x0, px.x());
        x1 = std::max(x1, px.x());
        y0 = std::min(y0, px.y());
        y1 = std::max(y1, px.y());
      }
      const double pad_x = 0.1 * (x1 - x0);
      const double pad_y = 0.1 * (y1 - y0);
      scene.bbox.x0 = std::max(0, static_cast<int>(std::floor(x0 - pad_x)));
      scene.bbox.y0 = std::max(0, static_cast<int>(std::floor(y0 - pad_y)));
      scene.bbox.x1 = std::min(cfg.image_width, static_cast<int>(std::ceil(x1 + pad_x)) + 1);
      scene.bbox.y1 = std::min(cfg.image_height, static_cast<int>(std::ceil(y1 + pad_y)) + 1);
      found = true;
    } catch (const PointBehindCameraError&) {
      continue;
    }
  }
  if (!found)
    throw std::runtime_error("pose sampling failed the in-frame constraint 1000 times");

  scene.heatmaps["low"] = MakeGaussianStack(scene.gt_landmarks2d, cfg.image_width,
                                            cfg.image_height, kSigmaLow);
  scene.heatmaps["medium"] = MakeGaussianStack(scene.gt_landmarks2d, cfg.image_width,
                                               cfg.image_height, kSigmaMedium);
  scene.heatmaps["high"] = MakeGaussianStack(scene.gt_landmarks2d, cfg.image_width,
                                             cfg.image_height, kSigmaHigh);
  return scene;
}

SyntheticScene CorruptScene(const SyntheticScene& scene, const CorruptionConfig& cfg) {
  if (scene.heatmaps.empty()) throw std::invalid_argument("scene has no clean heatmaps");
  if (cfg.occluded_fraction < 0.0 || cfg.occluded_fraction > 1.0)
    throw std::invalid_argument("occluded_fraction must lie in [0,1]");

  SyntheticScene out = scene;
  const int k = static_cast<int>(scene.gt_landmarks2d.size());
  const int width = scene.heatmaps.at("high").width;
  const int height = scene.heatmaps.at("high").height;
  const int n_occ = static_cast<int>(std::ceil(cfg.occluded_fraction * k - 1e-12));

  Pcg32 rng(cfg.seed);

  // Partial Fisher-Yates pick of the occluded channel set.
  std::vector<int> order(k);
  for (int i = 0; i < k; ++i) order[i] = i;
  for (int i = 0; i < n_occ; ++i)
    std::swap(order[i], order[i + rng.UniformBelow(static_cast<uint32_t>(k - i))]);
  std::vector<bool> occluded(k, false);
  for (int i = 0; i < n_occ; ++i) occluded[order[i]] = true;
  out.occluded_indices.clear();
  for (int i = 0; i < k; ++i)
    if (occluded[i]) out.occluded_indices.push_back(i);

  // Per-channel draws, channels visited in index order. Occluded channels:
  // shift direction, then blob positions (uniform in a disc of radius
  // 2 * occluded_shift around the true center) and amplitudes, first for the
  // high head, then (when decorrelated) again for the medium head. Clean
  // channels: one jitter vector shared by both heads.
  struct ChannelDraw {
    Eigen::Vector2d center_high, center_medium;
    std::vector<std::pair<Eigen::Vector2d, double>> blobs_high, blobs_medium;
    bool occluded = false;
  };
  std::vector<ChannelDraw> draws(k);

  const auto draw_occluded = [&](const Eigen::Vector2d& gt, Eigen::Vector2d* center,
                                 std::vector<std::pair<Eigen::Vector2d, double>>* blobs) {
    const double theta = 2.0 * M_PI * rng.UniformDouble();
    *center = gt + cfg.occluded_shift * Eigen::Vector2d(std::cos(theta), std::sin(theta));
    for (int bi = 0; bi < cfg.distractor_blobs; ++bi) {
      const double radius = 2.0 * cfg.occluded_shift * std::sqrt(rng.UniformDouble());
      const double phi = 2.0 * M_PI * rng.UniformDouble();
      const double amp = 0.2 + 0.3 * rng.UniformDouble();
      blobs->push_back(
          {gt + radius * Eigen::Vector2d(std::cos(phi), std::sin(phi)), amp});
    }
  };

  for (int i = 0; i < k; ++i) {
    const Eigen::Vector2d gt = scene.gt_landmarks2d[i].coords;
    draws[i].occluded = occluded[i];
    if (occluded[i]) {
      draw_occluded(gt, &draws[i].center_high, &draws[i].blobs_high);
      if (cfg.decorrelate_medium) {
        draw_occluded(gt, &draws[i].center_medium, &draws[i].blobs_medium);
      } else {
        draws[i].center_medium = draws[i].center_high;
        draws[i].blobs_medium = draws[i].blobs_high;
      }
    } else {
      const Eigen::Vector2d jitter(cfg.landmark_noise_sigma * rng.Normal(),
                                   cfg.landmark_noise_sigma * rng.Normal());
      draws[i].center_high = gt + jitter;
      draws[i].center_medium = gt + jitter;
    }
  }

  const auto build_level = [&](double sigma, bool medium) {
    HeatmapStack stack;
    stack.width = width;
    stack.height = height;
    stack.channels = k;
    stack.normalized = true;
    stack.values.resize(stack.ChannelSize() * k);
    for (int i = 0; i < k; ++i) {
      const ChannelDraw& d = draws[i];
      const Eigen::Vector2d& center = medium ? d.center_medium : d.center_high;
      if (d.occluded) {
        FillCorruptedChannel(&stack, i, sigma, center, cfg.flatten_factor,
                             medium ? d.blobs_medium : d.blobs_high, 1e-6);
      } else {
        // Same construction as the clean stacks so zero corruption
        // reproduces them bit-for-bit.
        const HeatmapStack one =
            MakeGaussianStack({{i, center}}, width, height, sigma);
        std::copy(one.values.begin(), one.values.end(),
                  stack.values.begin() + i * stack.ChannelSize());
      }
    }
    return stack;
  };

  out.corrupted_heatmaps["high"] = build_level(kSigmaHigh, false);
  out.corrupted_heatmaps["medium"] = build_level(kSigmaMedium, true);
  out.corrupted_heatmaps["low"] = scene.heatmaps.at("low");
  return out;
}

Manifest GenerateDataset(const DatasetConfig& cfg, const std::string& out_dir) {
  if (cfg.n_scenes < 1) throw std::invalid_argument("empty dataset");
  std::filesystem::create_directories(out_dir);

  Manifest manifest;
  PointCloud cloud = BuildCloud(cfg.scene);
  cloud.symmetric = cfg.symmetric;

  ObjectSpec obj;
  obj.id = cfg.object_id;
  if (cfg.scene.ply_path.empty()) {
    obj.builtin = cfg.scene.builtin;
    obj.cloud_seed = cfg.scene.cloud_seed;
  } else {
    // Copy the cloud next to the manifest so the dataset is self-contained.
    const std::string ply_name = cfg.object_id + ".ply";
    SavePly(cloud, (std::filesystem::path(out_dir) / ply_name).string());
    obj.ply_path = ply_name;
  }
  obj.symmetric = cloud.symmetric;
  obj.diameter_mm = Diameter(cloud);
  obj.n_landmarks = cfg.scene.n_landmarks;
  manifest.objects.push_back(obj);

  for (int i = 0; i < cfg.n_scenes; ++i) {
    char image_id[32];
    std::snprintf(image_id, sizeof(image_id), "img%04d", i);
    SyntheticScene scene =
        GenerateScene(cfg.scene, cfg.scene.seed ^ static_cast<uint64_t>(i));
    const std::map<std::string, HeatmapStack>* stacks = &scene.heatmaps;
    SyntheticScene corrupted;
    if (cfg.corruption) {
      CorruptionConfig per = *cfg.corruption;
      per.seed = cfg.corruption->seed ^ static_cast<uint64_t>(i);
      corrupted = CorruptScene(scene, per);
      stacks = &corrupted.corrupted_heatmaps;
    }

    SceneRecord rec;
    rec.image_id = image_id;
    rec.object_id = cfg.object_id;
    rec.gt_pose = scene.gt_pose;
    rec.intrinsics = scene.intrinsics;
    rec.bbox = scene.bbox;
    for (const auto& [level, stack] : *stacks) {
      const std::string name = std::string(image_id) + "_" + level + ".rhmp";
      SaveRhmp(stack, (std::filesystem::path(out_dir) / name).string());
      rec.heatmap_paths[level] = name;
    }
    manifest.scenes.push_back(rec);
  }

  SaveManifest(manifest, (std::filesystem::path(out_dir) / "manifest.json").string());
  return manifest;
}

}  // namespace rope
