// Command-line surface for the pose-estimation pipeline: synthetic dataset
// generation, pipeline execution, evaluation, OBA augmentation, FPS landmark
// selection, and pose metrics.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <thread>

#include "rope/evaluate.hpp"
#include "rope/pipeline.hpp"
#include "rope/synth.hpp"

namespace fs = std::filesystem;

namespace {

// Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.
constexpr int kExitData = 2;
constexpr int kExitNumerical = 3;

struct SynthArgs {
  rope::DatasetConfig dataset;
  std::string out_dir = "dataset";
  bool corrupt = false;
  rope::CorruptionConfig corruption;
  bool symmetric = false;
};

int CmdSynth(SynthArgs& args) {
  if (args.corrupt) args.dataset.corruption = args.corruption;
  rope::Manifest manifest = rope::GenerateDataset(args.dataset, args.out_dir);
  std::cout << "wrote " << manifest.scenes.size() << " scene(s), "
            << manifest.objects.size() << " object(s) to " << args.out_dir << "\n";
  if (args.dataset.corruption) {
    const auto& c = *args.dataset.corruption;
    std::cout << "corruption: occluded_fraction=" << c.occluded_fraction
              << " shift=" << c.occluded_shift << "px noise_sigma="
              << c.landmark_noise_sigma << " blobs=" << c.distractor_blobs
              << " flatten=" << c.flatten_factor
              << " decorrelate_medium=" << (c.decorrelate_medium ? 1 : 0) << "\n";
  } else {
    std::cout << "corruption: none (clean heatmaps)\n";
  }
  return 0;
}

struct RunArgs {
  std::string manifest_path;
  std::string out_path = "predictions.json";
  rope::PipelineOptions opts;
  int threads = 1;
};

int CmdRun(RunArgs& args) {
  const fs::path manifest_file(args.manifest_path);
  const std::string base_dir = manifest_file.parent_path().string();
  const rope::Manifest manifest = rope::LoadManifest(args.manifest_path);

  std::map<std::string, std::vector<rope::Landmark3D>> landmarks;
  for (const auto& obj : manifest.objects)
    landmarks[obj.id] =
        rope::FpsSelect(rope::BuildObjectCloud(obj, base_dir), obj.n_landmarks);

  const int n = static_cast<int>(manifest.scenes.size());
  std::vector<rope::Prediction> predictions(n);
  std::vector<std::string> failures(n);

  const auto process = [&](int i) {
    const rope::SceneRecord& scene = manifest.scenes[i];
    try {
      const auto resolve = [&](const std::string& level) {
        return rope::LoadRhmp((fs::path(base_dir) / scene.heatmap_paths.at(level)).string());
      };
      const rope::HeatmapStack high = resolve("high");
      const rope::HeatmapStack medium = resolve("medium");
      predictions[i] = rope::RunScenePipeline(scene.image_id, high, medium,
                                              landmarks.at(scene.object_id),
                                              scene.intrinsics, args.opts);
    } catch (const std::exception& e) {
      // Per-scene failure: record an invalid prediction, keep going.
      predictions[i].image_id = scene.image_id;
      predictions[i].pose_valid = false;
      failures[i] = e.what();
    }
  };

  const int threads = std::max(1, args.threads);
  if (threads == 1) {
    for (int i = 0; i < n; ++i) process(i);
  } else {
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    for (int t = 0; t < threads; ++t)
      pool.emplace_back([&] {
        for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) process(i);
      });
    for (auto& t : pool) t.join();
  }

  rope::SavePredictions(predictions, args.out_path);
  int failed = 0;
  for (int i = 0; i < n; ++i)
    if (!failures[i].empty()) {
      ++failed;
      std::cerr << "scene " << manifest.scenes[i].image_id << " failed: " << failures[i]
                << "\n";
    }
  std::cout << "wrote " << n << " prediction(s) (" << failed << " failed) to "
            << args.out_path << "\n";
  return 0;
}

struct EvalArgs {
  std::string predictions_path;
  std::string manifest_path;
  std::string out_prefix = "report";
};

int CmdEval(EvalArgs& args) {
  const rope::Manifest manifest = rope::LoadManifest(args.manifest_path);
  const auto predictions = rope::LoadPredictions(args.predictions_path);
  const std::string base_dir = fs::path(args.manifest_path).parent_path().string();
  const rope::EvaluationReport report =
      rope::EvaluateDataset(predictions, manifest, base_dir);
  rope::SaveReportJson(report, args.out_prefix + ".json");
  rope::SaveReportCsv(report, args.out_prefix + ".csv");
  std::cout << "pooled pass rate: " << report.pooled_pass_rate_pct << "%\n";
  std::cout << "pooled AUC: " << report.pooled_auc_pct << "%\n";
  for (const auto& s : report.per_object)
    std::cout << "object " << s.id << ": pass " << s.pass_rate_pct << "% auc "
              << s.auc_pct << "% over " << s.n_scenes << " scene(s)\n";
  return 0;
}

struct ObaArgs {
  std::string image_path;
  std::string out_path = "oba.png";
  std::vector<int> bbox;
  rope::ObaConfig cfg;
  std::vector<int> grid = {4, 4};
};

int CmdOba(ObaArgs& args) {
  const rope::ImageBuffer img = rope::LoadPng(args.image_path);
  if (args.bbox.size() != 4) throw std::runtime_error("--bbox needs x0,y0,x1,y1");
  const rope::BBox bbox{args.bbox[0], args.bbox[1], args.bbox[2], args.bbox[3]};
  if (!bbox.ValidFor(img.width, img.height))
    throw std::runtime_error("bbox outside image bounds");
  args.cfg.grid_rows = args.grid[0];
  args.cfg.grid_cols = args.grid[1];
  rope::SavePng(rope::ApplyOba(img, bbox, args.cfg), args.out_path);
  std::cout << "wrote " << args.out_path << "\n";
  return 0;
}

struct FpsArgs {
  std::string ply_path;
  int k = 11;
  std::string out_path;
};

int CmdFps(FpsArgs& args) {
  const rope::PointCloud cloud = rope::LoadPly(args.ply_path);
  const auto selected = rope::FpsSelect(cloud, args.k);
  nlohmann::json j = nlohmann::json::array();
  for (const auto& lm : selected) {
    j.push_back({{"index", lm.index},
                 {"x", lm.coords.x()},
                 {"y", lm.coords.y()},
                 {"z", lm.coords.z()}});
    std::cout << lm.index << ": " << lm.coords.transpose() << "\n";
  }
  if (!args.out_path.empty()) {
    std::ofstream out(args.out_path);
    if (!out) throw std::runtime_error("cannot write " + args.out_path);
    out << j.dump(2) << "\n";
  }
  return 0;
}

struct MetricsArgs {
  std::string pred_pose_path;
  std::string gt_pose_path;
  std::string ply_path;
  std::string distances_path;
  bool symmetric = false;
  double fraction = 0.1;
  double auc_max = 100.0;
};

int CmdMetrics(MetricsArgs& args) {
  if (!args.distances_path.empty()) {
    std::ifstream in(args.distances_path);
    if (!in) throw std::runtime_error("cannot open " + args.distances_path);
    std::vector<double> distances;
    double d;
    while (in >> d) distances.push_back(d);
    if (distances.empty()) throw std::runtime_error("no distances in file");
    std::cout << "auc: " << rope::Auc(distances, args.auc_max) << "\n";
    return 0;
  }

  const auto load_pose = [](const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open pose file: " + path);
    nlohmann::json j;
    in >> j;
    return rope::PoseFromJson(j);
  };
  const rope::Pose pred = load_pose(args.pred_pose_path);
  const rope::Pose gt = load_pose(args.gt_pose_path);
  rope::PointCloud cloud = rope::LoadPly(args.ply_path);
  cloud.symmetric = args.symmetric;

  const double diameter = rope::Diameter(cloud);
  const rope::PoseDistance add = rope::AddDistance(pred, gt, cloud);
  const rope::PoseDistance adds = rope::AddsDistance(pred, gt, cloud);
  const rope::PoseDistance& used = args.symmetric ? adds : add;
  std::cout << "diameter_mm: " << diameter << "\n";
  std::cout << "add_mm: " << add.value << "\n";
  std::cout << "adds_mm: " << adds.value << "\n";
  std::cout << "metric: " << (args.symmetric ? "ADD-S" : "ADD") << "\n";
  std::cout << "correct: " << (rope::PoseCorrect(used, diameter, args.fraction) ? 1 : 0)
            << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ROPE geometric pipeline: synthetic scenes, landmark decoding, "
               "verification filtering, RANSAC-PnP, and ADD(-S) evaluation"};
  app.require_subcommand(1);

  SynthArgs synth;
  CLI::App* cmd_synth = app.add_subcommand("synth", "generate a synthetic dataset");
  cmd_synth->add_option("--scenes", synth.dataset.n_scenes, "number of scenes");
  cmd_synth->add_option("--seed", synth.dataset.scene.seed, "base scene seed");
  cmd_synth->add_option("--out", synth.out_dir, "output directory");
  cmd_synth->add_option("--cloud", synth.dataset.scene.builtin,
                        "builtin cloud: cube|icosahedron|blob");
  cmd_synth->add_option("--ply", synth.dataset.scene.ply_path, "cloud from PLY file");
  cmd_synth->add_option("--cloud-seed", synth.dataset.scene.cloud_seed, "blob cloud seed");
  cmd_synth->add_option("--landmarks", synth.dataset.scene.n_landmarks,
                        "landmark count (FPS)");
  cmd_synth->add_flag("--symmetric", synth.symmetric, "flag the object symmetric");
  cmd_synth->add_option("--object-id", synth.dataset.object_id, "object id");
  cmd_synth->add_flag("--corrupt", synth.corrupt, "apply the occlusion-corruption model");
  cmd_synth->add_option("--noise-sigma", synth.corruption.landmark_noise_sigma,
                        "clean-channel center jitter, px");
  cmd_synth->add_option("--occluded-fraction", synth.corruption.occluded_fraction,
                        "fraction of occluded landmark channels");
  cmd_synth->add_option("--occluded-shift", synth.corruption.occluded_shift,
                        "occluded-center shift magnitude, px");
  cmd_synth->add_option("--distractor-blobs", synth.corruption.distractor_blobs,
                        "distractor blobs per occluded channel");
  cmd_synth->add_option("--flatten", synth.corruption.flatten_factor,
                        "occluded-channel peak multiplier");
  cmd_synth->add_flag("!--no-decorrelate-medium", synth.corruption.decorrelate_medium,
                      "shared (instead of independent) medium-head shift draws");
  cmd_synth->add_option("--corruption-seed", synth.corruption.seed, "corruption seed");

  RunArgs run;
  CLI::App* cmd_run = app.add_subcommand("run", "run the pipeline over a dataset");
  cmd_run->add_option("--manifest", run.manifest_path, "manifest.json path")->required();
  cmd_run->add_option("--out", run.out_path, "predictions output path");
  cmd_run->add_option("--seed", run.opts.ransac.seed, "RANSAC seed");
  cmd_run->add_option("--threads", run.threads, "worker threads");
  cmd_run->add_option("--epsilon", run.opts.filter.epsilon, "verification threshold, px");
  cmd_run->add_option("--ransac-thresh", run.opts.ransac.reproj_threshold,
                      "inlier reprojection threshold, px");
  cmd_run->add_option("--ransac-conf", run.opts.ransac.confidence, "RANSAC confidence");
  cmd_run->add_option("--ransac-iters", run.opts.ransac.max_iterations,
                      "RANSAC max iterations");
  cmd_run->add_flag("--no-filter", run.opts.no_filter, "skip verification filtering");
  cmd_run->add_flag("--argmax-decode", run.opts.argmax_decode,
                    "argmax decoding instead of spatial expectation");
  cmd_run->add_flag("--single-precision", run.opts.single_precision,
                    "decode the high head only");

  EvalArgs eval;
  CLI::App* cmd_eval = app.add_subcommand("eval", "evaluate predictions");
  cmd_eval->add_option("--predictions", eval.predictions_path, "predictions.json")
      ->required();
  cmd_eval->add_option("--manifest", eval.manifest_path, "manifest.json")->required();
  cmd_eval->add_option("--out", eval.out_prefix, "report path prefix (.json/.csv)");

  ObaArgs oba;
  CLI::App* cmd_oba = app.add_subcommand("oba", "occlude-and-blackout an image");
  cmd_oba->add_option("--image", oba.image_path, "input PNG")->required();
  cmd_oba->add_option("--out", oba.out_path, "output PNG");
  cmd_oba->add_option("--bbox", oba.bbox, "object bbox: x0 y0 x1 y1")->expected(4);
  cmd_oba->add_option("--oba-grid", oba.grid, "grid rows cols")->expected(2);
  cmd_oba->add_option("--oba-p", oba.cfg.p_occlude, "per-patch occlusion probability");
  cmd_oba->add_option("--oba-noise-p", oba.cfg.p_noise_vs_patch,
                      "probability of noise given occlusion");
  cmd_oba->add_option("--seed", oba.cfg.seed, "RNG seed");

  FpsArgs fps;
  CLI::App* cmd_fps = app.add_subcommand("fps", "farthest point sampling on a PLY cloud");
  cmd_fps->add_option("--ply", fps.ply_path, "input PLY")->required();
  cmd_fps->add_option("--k", fps.k, "number of landmarks");
  cmd_fps->add_option("--out", fps.out_path, "landmark JSON output");

  MetricsArgs metrics;
  CLI::App* cmd_metrics = app.add_subcommand("metrics", "pose distances / AUC");
  cmd_metrics->add_option("--pred-pose", metrics.pred_pose_path, "predicted pose JSON");
  cmd_metrics->add_option("--gt-pose", metrics.gt_pose_path, "groundtruth pose JSON");
  cmd_metrics->add_option("--ply", metrics.ply_path, "model PLY");
  cmd_metrics->add_flag("--symmetric", metrics.symmetric, "use ADD-S");
  cmd_metrics->add_option("--fraction", metrics.fraction, "pass threshold fraction");
  cmd_metrics->add_option("--distances", metrics.distances_path,
                          "whitespace-separated distance file; prints AUC");
  cmd_metrics->add_option("--auc-max", metrics.auc_max, "AUC threshold range, mm");

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_synth->parsed()) {
      synth.dataset.symmetric = synth.symmetric;
      return CmdSynth(synth);
    }
    if (cmd_run->parsed()) return CmdRun(run);
    if (cmd_eval->parsed()) return CmdEval(eval);
    if (cmd_oba->parsed()) return CmdOba(oba);
    if (cmd_fps->parsed()) return CmdFps(fps);
    if (cmd_metrics->parsed()) return CmdMetrics(metrics);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return 0;
}
