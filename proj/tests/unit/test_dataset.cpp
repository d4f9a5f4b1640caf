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
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "doctest.h"
#include "oracles/reference.hpp"
#include "orchard/dataset.hpp"
#include "orchard/errors.hpp"
#include "orchard/pgm.hpp"

using namespace orchard;
namespace fs = std::filesystem;

namespace {

ImageRecord image(ImageId id, Split split, std::int64_t w = 3840, std::int64_t h = 2160) {
  return ImageRecord{id, "img_" + std::to_string(id) + ".pgm", w, h, split};
}

AnnotationRecord ann(std::int64_t id, ImageId img, BoundingBox box) {
  return AnnotationRecord{id, img, box, {{"relative_size", 0.01}}};
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("orchard_test_dataset_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string minimal(const std::string& images, const std::string& annotations) {
  return R"({"schema":1,"images":)" + images + R"(,"annotations":)" + annotations + "}";
}

const std::string kOneImage =
    R"([{"id":1,"file_name":"a.pgm","width":100,"height":80,"split":"train"}])";

std::string schema_path(const std::string& text) {
  try {
    parse_dataset(text, ".", LoadOptions{false});
  } catch (const SchemaError& e) {
    return e.path();
  }
  return "<no error>";
}

}  // namespace

TEST_CASE("split names round-trip") {
  for (Split s : {Split::kTrain, Split::kVal, Split::kTest, Split::kUnlabeled}) {
    CHECK(parse_split(split_name(s)) == s);
  }
  CHECK_THROWS_AS(parse_split("holdout"), InvalidArgument);
}

TEST_CASE("manifest round-trip through a file") {
  const fs::path dir = fresh_dir("roundtrip");
  std::vector<ImageRecord> images{image(1, Split::kTrain), image(2, Split::kTest),
                                  image(3, Split::kUnlabeled)};
  for (const auto& img : images) {
    GrayImage g;
    g.width = 4;
    g.height = 4;
    g.pixels.assign(16, 0);
    write_pgm(dir / img.file_name, g);
  }
  const DatasetIndex idx(images,
                         {ann(10, 1, {0.5, 1.25, 30, 40}), ann(11, 2, {100, 100, 20, 20})},
                         dir);
  save_dataset(idx, dir / "manifest.json");
  const DatasetIndex back = load_dataset(dir / "manifest.json");
  CHECK(back == idx);
  CHECK(back.image_path(2) == dir / "img_2.pgm");
  CHECK(dump_dataset(back) == dump_dataset(idx));
}

TEST_CASE("MAD-shaped manifest reports the split counts") {
  std::vector<ImageRecord> images;
  std::vector<AnnotationRecord> anns;
  ImageId id = 1;
  std::int64_t next = 1;
  auto add = [&](Split s, int n, int per_image) {
    for (int i = 0; i < n; ++i, ++id) {
      images.push_back(image(id, s));
      for (int k = 0; k < per_image; ++k) {
        anns.push_back(ann(next++, id, {10.0 + 50 * k, 10, 40, 40}));
      }
    }
  };
  add(Split::kTrain, 66, 3);
  add(Split::kVal, 12, 2);
  add(Split::kTest, 27, 1);
  add(Split::kUnlabeled, 4440, 0);
  const DatasetIndex idx =
      parse_dataset(dump_dataset(DatasetIndex(images, anns)), ".", LoadOptions{false});
  const auto stats = idx.stats();
  CHECK(stats.at(Split::kTrain) == SplitStats{66, 198});
  CHECK(stats.at(Split::kVal) == SplitStats{12, 24});
  CHECK(stats.at(Split::kTest) == SplitStats{27, 27});
  CHECK(stats.at(Split::kUnlabeled) == SplitStats{4440, 0});
  CHECK(idx.image_ids(Split::kTest).size() == 27);
}

TEST_CASE("schema errors point at the offending field") {
  const std::string unl =
      R"([{"id":1,"file_name":"a.pgm","width":100,"height":80,"split":"unlabeled"}])";
  CHECK(schema_path(minimal(unl, R"([{"id":1,"image_id":1,"bbox":[0,0,5,5]}])")) ==
        "$.annotations[0].image_id");
  CHECK(schema_path(minimal(kOneImage, R"([{"id":1,"image_id":9,"bbox":[0,0,5,5]}])")) ==
        "$.annotations[0].image_id");
  CHECK(schema_path(minimal(kOneImage, R"([{"id":1,"image_id":1,"bbox":[90,0,20,5]}])")) ==
        "$.annotations[0].bbox");
  CHECK(schema_path(minimal(kOneImage, R"([{"id":1,"image_id":1,"bbox":[0,0,5]}])")) ==
        "$.annotations[0].bbox");
  CHECK(schema_path(minimal(kOneImage, R"([{"id":1,"image_id":1,"bbox":[0,"a",5,5]}])")) ==
        "$.annotations[0].bbox[1]");
  CHECK(schema_path(minimal(
            kOneImage,
            R"([{"id":1,"image_id":1,"bbox":[0,0,5,5]},{"id":1,"image_id":1,"bbox":[0,0,5,5]}])")) ==
        "$.annotations[1].id");
  CHECK(schema_path(minimal(
            R"([{"id":1,"file_name":"a.pgm","width":100,"height":80,"split":"dev"}])", "[]")) ==
        "$.images[0].split");
  CHECK(schema_path(minimal(R"([{"id":1,"width":100,"height":80,"split":"train"}])", "[]")) ==
        "$.images[0].file_name");
  CHECK(schema_path(R"({"schema":2,"images":[],"annotations":[]})") == "$.schema");
  CHECK(schema_path("{") == "$");
}

TEST_CASE("labeled image without annotations is accepted") {
  const auto idx = parse_dataset(minimal(kOneImage, "[]"), ".", LoadOptions{false});
  CHECK(idx.stats().at(Split::kTrain) == SplitStats{1, 0});
}

TEST_CASE("dangling image path raises MissingImage") {
  const fs::path dir = fresh_dir("missing");
  CHECK_THROWS_AS(parse_dataset(minimal(kOneImage, "[]"), dir), MissingImage);
  CHECK_THROWS_AS(load_dataset(dir / "nope.json"), IoError);
}

TEST_CASE("unlabeled corpus") {
  const DatasetIndex idx({image(1, Split::kUnlabeled), image(2, Split::kUnlabeled),
                          image(3, Split::kTrain)},
                         {});
  const TilingConfig cfg;
  auto constant = [](double v) {
    return [v](const ImageRecord& img) -> std::optional<AttentionMap> {
      AttentionMap m(img.size(), 0.25, img.id);
      m.fill(v);
      return m;
    };
  };
  CHECK(build_unlabeled_corpus(idx, constant(0.0), cfg).tiles.empty());
  const auto full = build_unlabeled_corpus(idx, constant(1.0), cfg, 4);
  CHECK(full.tiles.size() == 90);
  CHECK(full.warnings() == 0);
  for (std::size_t i = 1; i < full.tiles.size(); ++i) {
    const auto& a = full.tiles[i - 1];
    const auto& b = full.tiles[i];
    CHECK(std::make_pair(a.image, a.tile.id) < std::make_pair(b.image, b.tile.id));
  }

  auto square = [](const ImageRecord& img) -> std::optional<AttentionMap> {
    if (img.id != 1) return std::nullopt;
    AttentionMap m(img.size(), 1.0, img.id);
    for (std::int64_t y = 0; y < 800; ++y) {
      for (std::int64_t x = 0; x < 800; ++x) m.set(x, y, 1.0);
    }
    return m;
  };
  const auto corpus = build_unlabeled_corpus(idx, square, cfg);
  REQUIRE(corpus.tiles.size() == 4);
  CHECK(corpus.missing_maps == std::vector<ImageId>{2});
  CHECK(corpus.warnings() == 1);
  for (const auto& e : corpus.tiles) {
    CHECK(e.image == 1);
    CHECK(ImageSize(3840, 2160).bounds().contains(e.tile.rect()));
  }
}

TEST_CASE("corpus reads sidecar attention files") {
  const fs::path dir = fresh_dir("corpus");
  const DatasetIndex idx({image(5, Split::kUnlabeled, 1600, 800)}, {});
  AttentionMap m(ImageSize(1600, 800), 0.5, 5);
  m.fill(1.0);
  write_attention_pgm(dir / "5.attn.pgm", m);
  const auto corpus = build_unlabeled_corpus(idx, attention_from_directory(dir), {});
  CHECK(corpus.tiles.size() == 3);
}

TEST_CASE("alpha ground truth") {
  const DatasetIndex single({image(1, Split::kTrain)}, {ann(1, 1, {100, 200, 50, 60})});
  const PolygonSet one = alpha_gt_for_image(single, 1);
  REQUIRE(one.polygons.size() == 1);
  CHECK(area(one) == doctest::Approx(3000));

  const DatasetIndex empty({image(1, Split::kTrain)}, {});
  CHECK_THROWS_AS(alpha_gt_for_image(empty, 1), EmptyGroundTruth);
}

TEST_CASE("dense cluster forms one component covering every corner") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> coord(-222.0, 222.0);
  std::vector<AnnotationRecord> anns;
  std::vector<BoundingBox> boxes;
  while (boxes.size() < 20) {
    const double cx = coord(rng);
    const double cy = coord(rng);
    if (cx * cx + cy * cy > 222.0 * 222.0) continue;
    const BoundingBox b(std::round(1000 + cx - 20), std::round(1000 + cy - 20), 40, 40);
    bool clash = false;
    for (const auto& o : boxes) clash = clash || intersection_area(o, b) > 0;
    if (clash) continue;
    boxes.push_back(b);
    anns.push_back(ann(static_cast<std::int64_t>(boxes.size()), 1, b));
  }
  const DatasetIndex idx({image(1, Split::kTrain)}, anns);
  const auto corners = annotation_corners(idx, 1);
  REQUIRE(oracle::alpha_components(corners, 100.0) == 1);
  const PolygonSet shape = alpha_gt_for_image(idx, 1, 100.0);
  CHECK(shape.polygons.size() == 1);
  for (const Point2& p : corners) CHECK(contains(shape.polygons[0], p));
}
