// Copyright 2026 The Orchard Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// orchard: command-line front end. Exit codes: 0 success, 1 failure (or
// partial failure of a run), 2 usage error.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "orchard/dataset.hpp"
#include "orchard/detector.hpp"
#include "orchard/errors.hpp"
#include "orchard/evaluation.hpp"
#include "orchard/pgm.hpp"
#include "orchard/pipeline.hpp"
#include "orchard/semisup.hpp"
#include "orchard/serialization.hpp"
#include "orchard/svg_plot.hpp"
#include "orchard/synth.hpp"

namespace fs = std::filesystem;
using namespace orchard;

namespace {

constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kUsage = 2;

struct TilingFlags {
  std::int64_t tile_size = 800;
  std::int64_t stride = 400;
  double tau = 0.3;
  double coverage = 0.2;

  void add_to(CLI::App* app) {
    app->add_option("--tile-size", tile_size, "Tile side in pixels")->capture_default_str();
    app->add_option("--stride", stride, "Tile stride in pixels")->capture_default_str();
    app->add_option("--tau", tau, "Attention binarization threshold")->capture_default_str();
    app->add_option("--coverage", coverage, "Minimum mask coverage of a selected tile")
        ->capture_default_str();
  }
  TilingConfig config() const { return {tile_size, stride, tau, coverage}; }
};

struct RunFlags {
  std::string manifest;
  std::string out;
  std::string mode = "selective";
  std::string detector = "oracle";
  std::string attention = "gt-alpha";
  std::string split = "test";
  double alpha = 100.0;
  double scale = kDefaultAttentionScale;
  double band = 100.0;
  double nms_iou = 0.5;
  int jobs = 1;
  std::uint64_t seed = 0;
  std::int64_t timeout_ms = 30000;
  int repeats = 3;
  TilingFlags tiling;

  void add_to(CLI::App* app, bool bench) {
    app->add_option("--manifest", manifest, "Dataset manifest")->required();
    app->add_option("--out", out, bench ? "CSV output file (default stdout)"
                                        : "Output directory")
        ->required(!bench);
    if (!bench) {
      app->add_option("--mode", mode, "selective or standard")->capture_default_str();
    }
    app->add_option("--detector", detector, "oracle, synthetic or external:<cmd>")
        ->capture_default_str();
    app->add_option("--attention", attention, "gt-alpha or file:<dir>")
        ->capture_default_str();
    app->add_option("--alpha", alpha, "Alpha for gt-alpha attention")->capture_default_str();
    app->add_option("--scale", scale, "Attention map resolution")->capture_default_str();
    app->add_option("--split", split, "Images to process")->capture_default_str();
    app->add_option("--band", band, "Border band in pixels")->capture_default_str();
    app->add_option("--nms", nms_iou, "NMS IoU threshold")->capture_default_str();
    app->add_option("--jobs", jobs, "Concurrent images / tiles")->capture_default_str();
    app->add_option("--seed", seed, "Seed of the synthetic detector")->capture_default_str();
    app->add_option("--timeout-ms", timeout_ms, "External detector request timeout")
        ->capture_default_str();
    if (bench) {
      app->add_option("--repeats", repeats, "Runs per mode")->capture_default_str();
    }
    tiling.add_to(app);
  }

  PipelineConfig config() const {
    PipelineConfig cfg;
    cfg.tiling = tiling.config();
    cfg.reconstruction = {band, nms_iou};
    cfg.mode = parse_mode(mode);
    cfg.attention = parse_attention_spec(attention, alpha);
    cfg.attention_scale = scale;
    cfg.split = parse_split(split);
    cfg.jobs = jobs;
    cfg.validate();
    return cfg;
  }
};

std::unique_ptr<Detector> detector_for(const RunFlags& f, const DatasetIndex& index,
                                       Split split) {
  return make_detector(parse_detector_spec(f.detector, index, split, f.seed,
                                           std::chrono::milliseconds(f.timeout_ms)));
}

// All "<dir>/*.json" detection documents, keyed by image id.
DetectionsByImage load_detections(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  DetectionsByImage out;
  for (const fs::path& p : files) {
    const nlohmann::json j = read_json(p);
    auto dets = detections_from_json(j);
    auto& slot = out[image_id_of(j)];
    slot.insert(slot.end(), dets.begin(), dets.end());
  }
  return out;
}

void emit(const std::string& out, const std::string& text) {
  if (out.empty() || out == "-") {
    std::cout << text;
  } else {
    write_text(out, text);
  }
}

int cmd_run(const RunFlags& f) {
  const PipelineConfig cfg = f.config();
  const DatasetIndex index = load_dataset(f.manifest);
  auto detector = detector_for(f, index, cfg.split);
  const PipelineResult result = run_pipeline(index, cfg, *detector);
  write_pipeline_outputs(result, f.out);
  const std::size_t failed = result.report.failures();
  spdlog::info("{} images, {} failed, {} of {} tiles processed",
               result.report.images.size(), failed, result.report.tiles_selected(),
               result.report.tiles_total());
  return failed == 0 ? kOk : kFailure;
}

int cmd_bench(const RunFlags& f) {
  const PipelineConfig cfg = f.config();
  const DatasetIndex index = load_dataset(f.manifest);
  auto detector = detector_for(f, index, cfg.split);
  const std::vector<BenchRow> rows = bench_tiling(index, cfg, *detector, f.repeats);
  emit(f.out, bench_csv(rows));
  const bool failed = std::any_of(rows.begin(), rows.end(),
                                  [](const BenchRow& r) { return r.failures > 0; });
  return failed ? kFailure : kOk;
}

struct SynthFlags {
  std::string out;
  std::uint64_t seed = 0;
  int scenes = 1;
  std::int64_t width = 3840;
  std::int64_t height = 2160;
  std::int64_t apples = 50;
  std::int64_t min_size = 20;
  std::int64_t max_size = 200;
  std::vector<double> crown;
  std::string split = "test";
};

int cmd_synth(const SynthFlags& f) {
  SceneConfig cfg;
  cfg.seed = f.seed;
  cfg.width = f.width;
  cfg.height = f.height;
  cfg.apple_count = f.apples;
  cfg.min_size = f.min_size;
  cfg.max_size = f.max_size;
  if (!f.crown.empty()) {
    if (f.crown.size() != 4) throw InvalidArgument("--crown takes cx,cy,rx,ry");
    cfg.crown = {f.crown[0], f.crown[1], f.crown[2], f.crown[3]};
  }
  const DatasetIndex index = synth_dataset(cfg, f.scenes, f.out, parse_split(f.split));
  spdlog::info("wrote {} images and {} annotations to {}", index.images().size(),
               index.annotations().size(), f.out);
  return kOk;
}

struct GtAttentionFlags {
  std::string manifest;
  std::string out;
  double alpha = 100.0;
  double scale = kDefaultAttentionScale;
  std::vector<ImageId> images;
};

int cmd_gt_attention(const GtAttentionFlags& f) {
  const DatasetIndex index = load_dataset(f.manifest);
  fs::create_directories(f.out);
  std::vector<ImageId> ids = f.images;
  if (ids.empty()) {
    for (const ImageRecord& img : index.images()) {
      if (!index.annotations_of(img.id).empty()) ids.push_back(img.id);
    }
  }
  for (ImageId id : ids) {
    const ImageRecord& img = index.image(id);
    const PolygonSet shape = alpha_gt_for_image(index, id, f.alpha);
    const AttentionMap map = rasterize(shape, img.size(), f.scale, id);
    write_json(fs::path(f.out) / (std::to_string(id) + ".polygons.json"), to_json(shape));
    write_attention_pgm(fs::path(f.out) / (std::to_string(id) + ".attn.pgm"), map);
  }
  spdlog::info("wrote attention maps for {} images", ids.size());
  return kOk;
}

struct EvalFlags {
  std::string manifest;
  std::string detections;
  std::string split = "test";
  std::string out;
  std::string property = "relative_size";
  double bin_fraction = 0.02;
  std::size_t max_dets = 100;
};

int cmd_eval(const EvalFlags& f) {
  const DatasetIndex index = load_dataset(f.manifest, {.verify_images = false});
  const GroundTruthSet gts = index.ground_truth(parse_split(f.split));
  const EvalResult result = ap_ar(load_detections(f.detections), gts, f.max_dets);
  emit(f.out, to_json(result).dump(1) + "\n");
  return kOk;
}

int cmd_eval_bins(const EvalFlags& f) {
  const DatasetIndex index = load_dataset(f.manifest, {.verify_images = false});
  const GroundTruthSet gts = index.ground_truth(parse_split(f.split));
  gts.validate();
  const BinCurve curve = binned_ar(load_detections(f.detections), gts,
                                   property_bins(gts, f.property, f.bin_fraction),
                                   f.max_dets);
  write_text(f.out + ".csv", to_csv(curve));
  write_text(f.out + ".svg", svg_line_chart(curve));
  return kOk;
}

struct CorpusFlags {
  std::string manifest;
  std::string attention_dir;
  std::string out;
  int jobs = 1;
  TilingFlags tiling;
};

int cmd_build_corpus(const CorpusFlags& f) {
  const TilingConfig cfg = f.tiling.config();
  cfg.validate();
  const DatasetIndex index = load_dataset(f.manifest, {.verify_images = false});
  const TileCorpus corpus =
      build_unlabeled_corpus(index, attention_from_directory(f.attention_dir), cfg, f.jobs);
  emit(f.out, to_json(corpus).dump(1) + "\n");
  spdlog::info("{} tiles, {} images without attention maps", corpus.tiles.size(),
               corpus.warnings());
  return kOk;
}

struct PseudoFlags {
  std::string detections;
  std::string out;
  double conf = 0.9;
  double nms_iou = 0.5;
};

int cmd_pseudo_label(const PseudoFlags& f) {
  const PseudoLabelConfig cfg{f.conf, f.nms_iou};
  cfg.validate();
  fs::create_directories(f.out);
  std::size_t kept = 0;
  for (const auto& [id, dets] : load_detections(f.detections)) {
    const std::vector<BoundingBox> boxes = filter_pseudo_labels(dets, cfg);
    kept += boxes.size();
    write_json(fs::path(f.out) / (std::to_string(id) + ".json"),
               pseudo_labels_to_json(id, boxes));
  }
  spdlog::info("kept {} pseudo labels", kept);
  return kOk;
}

struct ScheduleFlags {
  std::string config;
  std::int64_t every = 5000;
  std::string out;
};

int cmd_schedule(const ScheduleFlags& f) {
  const TrainSchedule s =
      f.config.empty() ? TrainSchedule{} : schedule_from_json(read_json(f.config));
  s.validate();
  if (f.every < 1) throw InvalidArgument("--every must be positive");
  std::vector<std::int64_t> steps;
  for (std::int64_t t = 0; t < s.total_steps; t += f.every) steps.push_back(t);
  // Steps where either curve changes shape.
  for (std::int64_t d : s.lr_drops) steps.push_back(d);
  steps.push_back(s.total_steps - s.ratio_decay_span);
  steps.push_back(s.total_steps - 1);
  std::sort(steps.begin(), steps.end());
  steps.erase(std::unique(steps.begin(), steps.end()), steps.end());

  std::string text = "step,lr,labeled_ratio\n";
  char line[96];
  for (std::int64_t t : steps) {
    std::snprintf(line, sizeof line, "%lld,%.10g,%.10g\n", static_cast<long long>(t),
                  lr_at(t, s), ratio_at(t, s));
    text += line;
  }
  emit(f.out, text);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Selective tiling and evaluation toolkit for orchard imagery"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string log_level = "info";
  app.add_option("--log-level", log_level, "trace, debug, info, warn, error or off")
      ->capture_default_str();

  RunFlags run_flags;
  CLI::App* run = app.add_subcommand("run", "Tile, detect and reconstruct a dataset split");
  run_flags.add_to(run, false);

  RunFlags bench_flags;
  CLI::App* bench =
      app.add_subcommand("bench-tiling", "Compare standard and selective tiling");
  bench_flags.add_to(bench, true);

  SynthFlags synth_flags;
  CLI::App* synth = app.add_subcommand("synth", "Render synthetic orchard scenes");
  synth->add_option("--out", synth_flags.out, "Output directory")->required();
  synth->add_option("--seed", synth_flags.seed)->capture_default_str();
  synth->add_option("--scenes", synth_flags.scenes)->capture_default_str();
  synth->add_option("--width", synth_flags.width)->capture_default_str();
  synth->add_option("--height", synth_flags.height)->capture_default_str();
  synth->add_option("--apples", synth_flags.apples, "Apples per scene")->capture_default_str();
  synth->add_option("--min-size", synth_flags.min_size)->capture_default_str();
  synth->add_option("--max-size", synth_flags.max_size)->capture_default_str();
  synth->add_option("--crown", synth_flags.crown, "Crown ellipse cx,cy,rx,ry")
      ->delimiter(',')
      ->expected(4);
  synth->add_option("--split", synth_flags.split)->capture_default_str();

  GtAttentionFlags gt_flags;
  CLI::App* gt = app.add_subcommand("gt-attention",
                                    "Alpha-shape attention maps from annotations");
  gt->add_option("--manifest", gt_flags.manifest)->required();
  gt->add_option("--out", gt_flags.out, "Output directory")->required();
  gt->add_option("--alpha", gt_flags.alpha)->capture_default_str();
  gt->add_option("--scale", gt_flags.scale)->capture_default_str();
  gt->add_option("--image", gt_flags.images, "Restrict to these image ids");

  EvalFlags eval_flags;
  CLI::App* eval = app.add_subcommand("eval", "AP and AR of detections");
  eval->add_option("--manifest", eval_flags.manifest)->required();
  eval->add_option("--detections", eval_flags.detections, "Directory of detection files")
      ->required();
  eval->add_option("--split", eval_flags.split)->capture_default_str();
  eval->add_option("--max-dets", eval_flags.max_dets)->capture_default_str();
  eval->add_option("--out", eval_flags.out, "JSON output (default stdout)");

  EvalFlags bins_flags;
  CLI::App* bins = app.add_subcommand("eval-bins", "AR per property bin, as CSV and SVG");
  bins->add_option("--manifest", bins_flags.manifest)->required();
  bins->add_option("--detections", bins_flags.detections)->required();
  bins->add_option("--split", bins_flags.split)->capture_default_str();
  bins->add_option("--property", bins_flags.property)->capture_default_str();
  bins->add_option("--bin-fraction", bins_flags.bin_fraction)->capture_default_str();
  bins->add_option("--max-dets", bins_flags.max_dets)->capture_default_str();
  bins->add_option("--out", bins_flags.out, "Output prefix; writes <out>.csv and <out>.svg")
      ->required();

  CorpusFlags corpus_flags;
  CLI::App* corpus =
      app.add_subcommand("build-corpus", "Selected tiles of all unlabeled images");
  corpus->add_option("--manifest", corpus_flags.manifest)->required();
  corpus->add_option("--attention-dir", corpus_flags.attention_dir,
                     "Directory of <image_id>.attn.pgm maps")
      ->required();
  corpus->add_option("--out", corpus_flags.out, "JSON output (default stdout)");
  corpus->add_option("--jobs", corpus_flags.jobs)->capture_default_str();
  corpus_flags.tiling.add_to(corpus);

  PseudoFlags pseudo_flags;
  CLI::App* pseudo = app.add_subcommand("pseudo-label", "Filter teacher detections");
  pseudo->add_option("--detections", pseudo_flags.detections)->required();
  pseudo->add_option("--out", pseudo_flags.out, "Output directory")->required();
  pseudo->add_option("--conf", pseudo_flags.conf)->capture_default_str();
  pseudo->add_option("--nms", pseudo_flags.nms_iou)->capture_default_str();

  ScheduleFlags sched_flags;
  CLI::App* sched = app.add_subcommand("schedule", "Learning-rate and labeled-ratio table");
  sched->add_option("--config", sched_flags.config, "Schedule JSON (defaults otherwise)");
  sched->add_option("--every", sched_flags.every)->capture_default_str();
  sched->add_option("--out", sched_flags.out, "CSV output (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  auto logger = spdlog::stderr_color_mt("orchard");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::from_str(log_level));

  try {
    if (*run) return cmd_run(run_flags);
    if (*bench) return cmd_bench(bench_flags);
    if (*synth) return cmd_synth(synth_flags);
    if (*gt) return cmd_gt_attention(gt_flags);
    if (*eval) return cmd_eval(eval_flags);
    if (*bins) return cmd_eval_bins(bins_flags);
    if (*corpus) return cmd_build_corpus(corpus_flags);
    if (*pseudo) return cmd_pseudo_label(pseudo_flags);
    if (*sched) return cmd_schedule(sched_flags);
  } catch (const InvalidArgument& e) {
    spdlog::error("{}", e.what());
    return kUsage;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kFailure;
  }
  return kUsage;
}
