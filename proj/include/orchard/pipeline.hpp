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
#ifndef ORCHARD_PIPELINE_HPP_
#define ORCHARD_PIPELINE_HPP_

// End-to-end driver: attention -> tiles -> per-tile detection ->
// reconstruction, for every image of one split.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "orchard/dataset.hpp"
#include "orchard/detector.hpp"
#include "orchard/evaluation.hpp"
#include "orchard/reconstruction.hpp"
#include "orchard/tiling.hpp"

namespace orchard {

enum class TilingMode { kSelective, kStandard };

const char* mode_name(TilingMode mode);
// Throws InvalidArgument.
TilingMode parse_mode(const std::string& name);

// Attention from the alpha shape of the image's own annotations.
struct GtAlphaAttention {
  double alpha = 100.0;
};
// Attention maps stored as <dir>/<image_id>.attn.pgm.
struct FileAttention {
  std::filesystem::path dir;
};
using AttentionSpec = std::variant<GtAlphaAttention, FileAttention>;

// "gt-alpha" or "file:<dir>". Throws InvalidArgument.
AttentionSpec parse_attention_spec(const std::string& text, double alpha = 100.0);

// "oracle", "synthetic" or "external:<shell command>"; oracle and synthetic
// detectors answer from the annotations of `split`. Throws InvalidArgument.
DetectorHandle parse_detector_spec(const std::string& text,
                                   const DatasetIndex& index, Split split,
                                   std::uint64_t seed,
                                   std::chrono::milliseconds timeout =
                                       std::chrono::milliseconds(30000));

// The image-resolution GT alpha mask: alpha shape, rasterized at `scale`,
// binarized at tau and upsampled.
BinaryMask gt_alpha_mask(const DatasetIndex& index, ImageId image, double alpha,
                         double scale, double tau);

struct PipelineConfig {
  TilingConfig tiling;
  ReconstructionConfig reconstruction;
  TilingMode mode = TilingMode::kSelective;
  AttentionSpec attention = GtAlphaAttention{};
  double attention_scale = kDefaultAttentionScale;
  Split split = Split::kTest;
  // Images processed concurrently; also the per-image tile fan-out.
  int jobs = 1;

  // Throws InvalidArgument.
  void validate() const;
};

struct StageSeconds {
  double attention = 0.0;
  double tiling = 0.0;
  double detection = 0.0;
  double reconstruction = 0.0;
  double total() const { return attention + tiling + detection + reconstruction; }
};

struct ImageReport {
  ImageId image = 0;
  std::int64_t tiles_total = 0;
  std::int64_t tiles_selected = 0;
  std::int64_t detections_raw = 0;
  std::int64_t detections_before_nms = 0;
  std::int64_t detections_after_nms = 0;
  StageSeconds seconds;
  // Set when the image failed; its detections are then absent.
  std::optional<std::string> error;
};

struct RunReport {
  std::vector<ImageReport> images;
  std::size_t failures() const;
  std::int64_t tiles_total() const;
  std::int64_t tiles_selected() const;
};

nlohmann::json to_json(const RunReport& report);

struct PipelineResult {
  RunReport report;
  // Successful images only, in image-id order.
  std::map<ImageId, std::vector<Detection>> detections;
};

// Per-image failures are recorded in the report and do not stop the run.
PipelineResult run_pipeline(const DatasetIndex& index, const PipelineConfig& cfg,
                            Detector& detector);

// Writes <out>/detections/<image_id>.json and <out>/report.json.
void write_pipeline_outputs(const PipelineResult& result,
                            const std::filesystem::path& out);

struct BenchRow {
  TilingMode mode = TilingMode::kStandard;
  std::int64_t tiles_total = 0;
  std::int64_t tiles_processed = 0;
  double median_seconds = 0.0;
  double ap = 0.0;
  double ar = 0.0;
  std::size_t failures = 0;
};

// Runs the pipeline `repeats` times per mode (standard first) and evaluates
// the last run of each against the split's ground truth.
std::vector<BenchRow> bench_tiling(const DatasetIndex& index,
                                   const PipelineConfig& cfg, Detector& detector,
                                   int repeats);
std::string bench_csv(const std::vector<BenchRow>& rows);

}  // namespace orchard

#endif  // ORCHARD_PIPELINE_HPP_
