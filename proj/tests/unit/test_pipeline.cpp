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
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>

#include "doctest.h"
#include "orchard/errors.hpp"
#include "orchard/pgm.hpp"
#include "orchard/pipeline.hpp"
#include "orchard/serialization.hpp"
#include "orchard/synth.hpp"

using namespace orchard;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("orchard_test_pipeline_" + name);
  fs::remove_all(dir);
  return dir;
}

SceneConfig scene_config() {
  SceneConfig cfg;
  cfg.seed = 21;
  cfg.width = 1920;
  cfg.height = 1080;
  cfg.apple_count = 40;
  cfg.min_size = 20;
  cfg.max_size = 120;
  cfg.crown = Ellipse{960, 540, 500, 400};
  return cfg;
}

const DatasetIndex& dataset() {
  static const DatasetIndex index = synth_dataset(scene_config(), 3, scratch("data"));
  return index;
}

std::unique_ptr<Detector> oracle() {
  return make_detector(parse_detector_spec("oracle", dataset(), Split::kTest, 0));
}

int run(const std::string& cmd) {
  const int status = std::system((cmd + " 2>/dev/null").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string manifest() { return (dataset().root() / "manifest.json").string(); }

}  // namespace

TEST_CASE("mode, attention and detector flags parse") {
  CHECK(parse_mode("standard") == TilingMode::kStandard);
  CHECK_THROWS_AS(parse_mode("fast"), InvalidArgument);
  CHECK(std::holds_alternative<GtAlphaAttention>(parse_attention_spec("gt-alpha")));
  CHECK(std::get<FileAttention>(parse_attention_spec("file:/x")).dir == "/x");
  CHECK_THROWS_AS(parse_attention_spec("file:"), InvalidArgument);
  const auto ext = parse_detector_spec("external:run me", dataset(), Split::kTest, 0);
  CHECK(std::get<ExternalSpec>(ext).argv ==
        std::vector<std::string>{"/bin/sh", "-c", "run me"});
  CHECK_THROWS_AS(parse_detector_spec("yolo", dataset(), Split::kTest, 0), InvalidArgument);
}

TEST_CASE("standard tiling with the oracle recovers every apple exactly once") {
  PipelineConfig cfg;
  cfg.mode = TilingMode::kStandard;
  auto det = oracle();
  const PipelineResult r = run_pipeline(dataset(), cfg, *det);
  CHECK(r.report.failures() == 0);
  const ImageSize size(1920, 1080);
  for (const auto& [img, boxes] : dataset().boxes(Split::kTest)) {
    const auto& dets = r.detections.at(img);
    CHECK(dets.size() == boxes.size());
    for (const BoundingBox& g : boxes) {
      const bool touches = g.x() == 0 || g.y() == 0 || g.right() == size.width ||
                           g.bottom() == size.height;
      if (touches || g.w() > 200 || g.h() > 200) continue;
      int hits = 0;
      for (const Detection& d : dets) hits += iou(d.box(), g) >= 0.99;
      CHECK(hits == 1);
    }
  }
  const EvalResult e = ap_ar(r.detections, dataset().ground_truth(Split::kTest));
  CHECK(e.ap == doctest::Approx(1.0));
}

TEST_CASE("selective tiling with an all-one map equals standard tiling") {
  const fs::path dir = scratch("ones");
  fs::create_directories(dir);
  for (const ImageRecord& img : dataset().images()) {
    AttentionMap m(img.size(), 0.25, img.id);
    m.fill(1.0);
    write_attention_pgm(dir / (std::to_string(img.id) + ".attn.pgm"), m);
  }
  auto det = oracle();
  PipelineConfig standard;
  standard.mode = TilingMode::kStandard;
  PipelineConfig selective;
  selective.attention = FileAttention{dir};
  const auto a = run_pipeline(dataset(), standard, *det);
  const auto b = run_pipeline(dataset(), selective, *det);
  CHECK(a.detections == b.detections);
  CHECK(a.report.tiles_total() == b.report.tiles_selected());
}

TEST_CASE("sparse crown selects fewer tiles than the grid") {
  auto det = oracle();
  const auto r = run_pipeline(dataset(), PipelineConfig{}, *det);
  CHECK(r.report.failures() == 0);
  CHECK(r.report.tiles_selected() < r.report.tiles_total());
  for (const ImageReport& ir : r.report.images) {
    CHECK(ir.detections_after_nms <= ir.detections_before_nms);
    CHECK(ir.detections_before_nms <= ir.detections_raw);
    CHECK(ir.tiles_selected <= ir.tiles_total);
  }
  const EvalResult e = ap_ar(r.detections, dataset().ground_truth(Split::kTest));
  CHECK(e.ar > 0.9);
}

TEST_CASE("jobs do not change the output") {
  auto det = make_detector(parse_detector_spec("synthetic", dataset(), Split::kTest, 3));
  PipelineConfig one;
  PipelineConfig many;
  many.jobs = 8;
  CHECK(run_pipeline(dataset(), one, *det).detections ==
        run_pipeline(dataset(), many, *det).detections);
}

TEST_CASE("external detector end to end") {
  auto det = make_detector(parse_detector_spec(
      std::string("external:") + STUB_DETECTOR + " echo", dataset(), Split::kTest, 0));
  PipelineConfig cfg;
  cfg.jobs = 4;
  const auto r = run_pipeline(dataset(), cfg, *det);
  CHECK(r.report.failures() == 0);
  for (const auto& [img, dets] : r.detections) {
    for (const Detection& d : dets) {
      CHECK(d.frame() == Frame{ImageGlobal{img}});
      CHECK(d.box().w() == 50);
    }
  }
}

TEST_CASE("a failing image is reported without stopping the run") {
  const fs::path dir = scratch("partial");
  fs::create_directories(dir);
  const ImageRecord& first = dataset().images().front();
  AttentionMap m(first.size(), 0.25, first.id);
  m.fill(1.0);
  write_attention_pgm(dir / (std::to_string(first.id) + ".attn.pgm"), m);
  PipelineConfig cfg;
  cfg.attention = FileAttention{dir};
  auto det = oracle();
  const auto r = run_pipeline(dataset(), cfg, *det);
  CHECK(r.report.failures() == 2);
  CHECK(r.detections.size() == 1);
  CHECK(r.detections.count(first.id) == 1);

  const fs::path out = scratch("partial_out");
  CHECK(run(std::string(ORCHARD_CLI) + " run --manifest " + manifest() + " --out " +
            out.string() + " --attention file:" + dir.string()) == 1);
  const auto report = read_json(out / "report.json");
  CHECK(report["failures"] == 2);
}

TEST_CASE("cli output is byte-identical across worker counts") {
  const fs::path a = scratch("cli_a");
  const fs::path b = scratch("cli_b");
  const std::string base = std::string(ORCHARD_CLI) + " run --manifest " + manifest() +
                           " --detector synthetic --seed 5 --out ";
  REQUIRE(run(base + a.string() + " --jobs 1") == 0);
  REQUIRE(run(base + b.string() + " --jobs 8") == 0);
  int files = 0;
  for (const auto& entry : fs::directory_iterator(a / "detections")) {
    ++files;
    CHECK(slurp(entry.path()) == slurp(b / "detections" / entry.path().filename()));
  }
  CHECK(files == 3);
}

TEST_CASE("cli usage errors exit with 2") {
  CHECK(run(std::string(ORCHARD_CLI) + " run --out /tmp/x") == 2);
  CHECK(run(std::string(ORCHARD_CLI) + " run --manifest " + manifest() +
            " --out /tmp/x --mode fast") == 2);
  CHECK(run(std::string(ORCHARD_CLI) + " frobnicate") == 2);
}

TEST_CASE("cli evaluation of oracle output") {
  const fs::path out = scratch("cli_eval");
  REQUIRE(run(std::string(ORCHARD_CLI) + " run --mode standard --manifest " + manifest() +
              " --out " + out.string()) == 0);
  REQUIRE(run(std::string(ORCHARD_CLI) + " eval --manifest " + manifest() +
              " --detections " + (out / "detections").string() + " --out " +
              (out / "eval.json").string()) == 0);
  CHECK(read_json(out / "eval.json")["ap"].get<double>() == doctest::Approx(1.0));
  REQUIRE(run(std::string(ORCHARD_CLI) + " eval-bins --manifest " + manifest() +
              " --detections " + (out / "detections").string() + " --out " +
              (out / "bins").string()) == 0);
  CHECK(fs::exists(out / "bins.csv"));
  CHECK(fs::exists(out / "bins.svg"));
}

TEST_CASE("bench rows") {
  auto det = oracle();
  const auto rows = bench_tiling(dataset(), PipelineConfig{}, *det, 1);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].mode == TilingMode::kStandard);
  CHECK(rows[0].tiles_processed == rows[0].tiles_total);
  CHECK(rows[1].tiles_processed < rows[1].tiles_total);
  CHECK(bench_csv(rows).rfind("mode,tiles_total,tiles_processed,median_seconds,ap,ar,failures\n",
                              0) == 0);
}
