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
#include "orchard/pipeline.hpp"

#include <algorithm>
#include <sstream>

#include <spdlog/spdlog.h>

#include "orchard/attention.hpp"
#include "orchard/errors.hpp"
#include "orchard/pgm.hpp"
#include "orchard/serialization.hpp"
#include "parallel.hpp"

namespace orchard {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

BinaryMask attention_mask(const DatasetIndex& index, const ImageRecord& img,
                          const PipelineConfig& cfg) {
  if (const auto* gt = std::get_if<GtAlphaAttention>(&cfg.attention)) {
    return gt_alpha_mask(index, img.id, gt->alpha, cfg.attention_scale, cfg.tiling.tau);
  }
  const auto& file = std::get<FileAttention>(cfg.attention);
  const AttentionMap map = read_attention_pgm(
      file.dir / (std::to_string(img.id) + ".attn.pgm"), img.size(), img.id);
  return full_resolution_mask(map, cfg.tiling.tau);
}

std::vector<Detection> process_image(const DatasetIndex& index,
                                     const PipelineConfig& cfg, Detector& detector,
                                     ImageReport& report) {
  const ImageRecord& img = index.image(report.image);
  const ImageSize size = img.size();

  auto start = Clock::now();
  const std::vector<Tile> grid = tile_grid(size, cfg.tiling, img.id);
  std::vector<Tile> tiles;
  if (cfg.mode == TilingMode::kStandard) {
    tiles = grid;
  } else {
    const BinaryMask mask = attention_mask(index, img, cfg);
    report.seconds.attention = seconds_since(start);
    start = Clock::now();
    tiles = select_tiles(mask, cfg.tiling, size, img.id);
  }
  report.seconds.tiling = seconds_since(start);
  report.tiles_total = static_cast<std::int64_t>(grid.size());
  report.tiles_selected = static_cast<std::int64_t>(tiles.size());

  start = Clock::now();
  const std::filesystem::path image_path = index.image_path(img.id);
  std::vector<std::vector<Detection>> results(tiles.size());
  internal::parallel_for(tiles.size(), cfg.jobs, [&](std::size_t k) {
    const TileTask task{std::to_string(img.id) + "-" + std::to_string(tiles[k].id),
                        tiles[k], image_path};
    results[k] = detect_tile(detector, task);
  });
  report.seconds.detection = seconds_since(start);

  start = Clock::now();
  PerTileDetections per_tile;
  for (std::size_t k = 0; k < tiles.size(); ++k) {
    per_tile[tiles[k].id] = std::move(results[k]);
  }
  ReconstructionStats stats;
  std::vector<Detection> merged =
      reconstruct(per_tile, tiles, size, img.id, cfg.reconstruction, &stats);
  report.seconds.reconstruction = seconds_since(start);
  report.detections_raw = static_cast<std::int64_t>(stats.raw);
  report.detections_before_nms = static_cast<std::int64_t>(stats.before_nms);
  report.detections_after_nms = static_cast<std::int64_t>(stats.after_nms);
  return merged;
}

}  // namespace

const char* mode_name(TilingMode mode) {
  return mode == TilingMode::kSelective ? "selective" : "standard";
}

TilingMode parse_mode(const std::string& name) {
  if (name == "selective") return TilingMode::kSelective;
  if (name == "standard") return TilingMode::kStandard;
  throw InvalidArgument("unknown tiling mode '" + name + "'");
}

AttentionSpec parse_attention_spec(const std::string& text, double alpha) {
  if (text == "gt-alpha") {
    if (!(alpha > 0.0)) throw InvalidArgument("alpha must be positive");
    return GtAlphaAttention{alpha};
  }
  if (text.rfind("file:", 0) == 0 && text.size() > 5) {
    return FileAttention{text.substr(5)};
  }
  throw InvalidArgument("attention must be gt-alpha or file:<dir>, got '" + text + "'");
}

DetectorHandle parse_detector_spec(const std::string& text, const DatasetIndex& index,
                                   Split split, std::uint64_t seed,
                                   std::chrono::milliseconds timeout) {
  if (text == "oracle") return OracleSpec{index.boxes(split)};
  if (text == "synthetic") return SyntheticSpec{index.boxes(split), seed, {}};
  if (text.rfind("external:", 0) == 0 && text.size() > 9) {
    return ExternalSpec{{"/bin/sh", "-c", text.substr(9)}, timeout};
  }
  throw InvalidArgument("detector must be oracle, synthetic or external:<cmd>, got '" +
                        text + "'");
}

BinaryMask gt_alpha_mask(const DatasetIndex& index, ImageId image, double alpha,
                         double scale, double tau) {
  const ImageRecord& img = index.image(image);
  const PolygonSet shape = alpha_gt_for_image(index, image, alpha);
  return full_resolution_mask(rasterize(shape, img.size(), scale, image), tau);
}

void PipelineConfig::validate() const {
  tiling.validate();
  reconstruction.validate(tiling.tile_size);
  if (!(attention_scale > 0.0 && attention_scale <= 1.0)) {
    throw InvalidArgument("attention scale must lie in (0, 1]");
  }
  if (jobs < 1) throw InvalidArgument("jobs must be at least 1");
}

std::size_t RunReport::failures() const {
  return static_cast<std::size_t>(std::count_if(
      images.begin(), images.end(), [](const ImageReport& r) { return r.error.has_value(); }));
}

std::int64_t RunReport::tiles_total() const {
  std::int64_t n = 0;
  for (const ImageReport& r : images) n += r.tiles_total;
  return n;
}

std::int64_t RunReport::tiles_selected() const {
  std::int64_t n = 0;
  for (const ImageReport& r : images) n += r.tiles_selected;
  return n;
}

nlohmann::json to_json(const RunReport& report) {
  nlohmann::json images = nlohmann::json::array();
  for (const ImageReport& r : report.images) {
    nlohmann::json j = {{"image_id", r.image},
                        {"tiles_total", r.tiles_total},
                        {"tiles_selected", r.tiles_selected},
                        {"detections_raw", r.detections_raw},
                        {"detections_before_nms", r.detections_before_nms},
                        {"detections_after_nms", r.detections_after_nms},
                        {"seconds",
                         {{"attention", r.seconds.attention},
                          {"tiling", r.seconds.tiling},
                          {"detection", r.seconds.detection},
                          {"reconstruction", r.seconds.reconstruction}}}};
    if (r.error) j["error"] = *r.error;
    images.push_back(std::move(j));
  }
  return {{"images", std::move(images)},
          {"tiles_total", report.tiles_total()},
          {"tiles_selected", report.tiles_selected()},
          {"failures", report.failures()}};
}

PipelineResult run_pipeline(const DatasetIndex& index, const PipelineConfig& cfg,
                            Detector& detector) {
  cfg.validate();
  const std::vector<ImageId> ids = index.image_ids(cfg.split);
  std::vector<ImageReport> reports(ids.size());
  std::vector<std::optional<std::vector<Detection>>> outputs(ids.size());
  internal::parallel_for(ids.size(), cfg.jobs, [&](std::size_t i) {
    reports[i].image = ids[i];
    try {
      outputs[i] = process_image(index, cfg, detector, reports[i]);
    } catch (const std::exception& e) {
      spdlog::error("image {} failed: {}", ids[i], e.what());
      reports[i].error = e.what();
    }
  });

  PipelineResult result;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (outputs[i]) result.detections.emplace(ids[i], std::move(*outputs[i]));
  }
  result.report.images = std::move(reports);
  return result;
}

void write_pipeline_outputs(const PipelineResult& result,
                            const std::filesystem::path& out) {
  const std::filesystem::path det_dir = out / "detections";
  std::error_code ec;
  std::filesystem::create_directories(det_dir, ec);
  if (ec) throw IoError("cannot create " + det_dir.string() + ": " + ec.message());
  for (const auto& [id, dets] : result.detections) {
    write_json(det_dir / (std::to_string(id) + ".json"), detections_to_json(id, dets));
  }
  write_json(out / "report.json", to_json(result.report));
}

std::vector<BenchRow> bench_tiling(const DatasetIndex& index, const PipelineConfig& cfg,
                                   Detector& detector, int repeats) {
  if (repeats < 1) throw InvalidArgument("repeats must be at least 1");
  const GroundTruthSet gts = index.ground_truth(cfg.split);
  std::vector<BenchRow> rows;
  for (TilingMode mode : {TilingMode::kStandard, TilingMode::kSelective}) {
    PipelineConfig c = cfg;
    c.mode = mode;
    std::vector<double> times;
    PipelineResult last;
    for (int r = 0; r < repeats; ++r) {
      const auto start = Clock::now();
      last = run_pipeline(index, c, detector);
      times.push_back(seconds_since(start));
    }
    std::sort(times.begin(), times.end());
    const std::size_t n = times.size();
    const double median =
        n % 2 == 1 ? times[n / 2] : 0.5 * (times[n / 2 - 1] + times[n / 2]);
    const EvalResult eval = ap_ar(last.detections, gts);
    rows.push_back(BenchRow{mode, last.report.tiles_total(),
                            last.report.tiles_selected(), median, eval.ap, eval.ar,
                            last.report.failures()});
  }
  return rows;
}

std::string bench_csv(const std::vector<BenchRow>& rows) {
  std::ostringstream os;
  os.precision(10);
  os << "mode,tiles_total,tiles_processed,median_seconds,ap,ar,failures\n";
  for (const BenchRow& r : rows) {
    os << mode_name(r.mode) << "," << r.tiles_total << "," << r.tiles_processed << ","
       << r.median_seconds << "," << r.ap << "," << r.ar << "," << r.failures << "\n";
  }
  return os.str();
}

}  // namespace orchard
