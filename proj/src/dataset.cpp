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
#include "orchard/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <spdlog/spdlog.h>

#include "json.hpp"
#include "orchard/errors.hpp"
#include "orchard/pgm.hpp"
#include "parallel.hpp"

namespace orchard {

using nlohmann::json;

const char* split_name(Split split) {
  switch (split) {
    case Split::kTrain:
      return "train";
    case Split::kVal:
      return "val";
    case Split::kTest:
      return "test";
    case Split::kUnlabeled:
      return "unlabeled";
  }
  return "?";
}

Split parse_split(const std::string& name) {
  if (name == "train") return Split::kTrain;
  if (name == "val") return Split::kVal;
  if (name == "test") return Split::kTest;
  if (name == "unlabeled") return Split::kUnlabeled;
  throw InvalidArgument("unknown split '" + name + "'");
}

DatasetIndex::DatasetIndex(std::vector<ImageRecord> images,
                           std::vector<AnnotationRecord> annotations,
                           std::filesystem::path root)
    : images_(std::move(images)),
      annotations_(std::move(annotations)),
      root_(std::move(root)) {
  for (std::size_t i = 0; i < images_.size(); ++i) {
    const ImageRecord& img = images_[i];
    const std::string at = "$.images[" + std::to_string(i) + "]";
    if (img.width < 1 || img.height < 1) {
      throw SchemaError(at, "width and height must be >= 1");
    }
    if (!image_pos_.emplace(img.id, i).second) {
      throw SchemaError(at + ".id", "duplicate image id " + std::to_string(img.id));
    }
  }
  std::set<std::int64_t> ann_ids;
  for (std::size_t i = 0; i < annotations_.size(); ++i) {
    const AnnotationRecord& a = annotations_[i];
    const std::string at = "$.annotations[" + std::to_string(i) + "]";
    if (!ann_ids.insert(a.id).second) {
      throw SchemaError(at + ".id", "duplicate annotation id " + std::to_string(a.id));
    }
    auto pos = image_pos_.find(a.image_id);
    if (pos == image_pos_.end()) {
      throw SchemaError(at + ".image_id",
                        "unknown image " + std::to_string(a.image_id));
    }
    const ImageRecord& img = images_[pos->second];
    if (img.split == Split::kUnlabeled) {
      throw SchemaError(at + ".image_id", "annotation on unlabeled image " +
                                              std::to_string(img.id));
    }
    if (!img.size().bounds().contains(a.box)) {
      throw SchemaError(at + ".bbox", "box lies outside its image");
    }
    for (const auto& [name, value] : a.properties) {
      if (!std::isfinite(value)) {
        throw SchemaError(at + ".properties." + name, "value must be finite");
      }
    }
    by_image_[a.image_id].push_back(i);
  }
}

const ImageRecord& DatasetIndex::image(ImageId id) const {
  auto it = image_pos_.find(id);
  if (it == image_pos_.end()) {
    throw InvalidArgument("unknown image id " + std::to_string(id));
  }
  return images_[it->second];
}

std::vector<const AnnotationRecord*> DatasetIndex::annotations_of(ImageId id) const {
  std::vector<const AnnotationRecord*> out;
  auto it = by_image_.find(id);
  if (it == by_image_.end()) return out;
  for (std::size_t i : it->second) out.push_back(&annotations_[i]);
  return out;
}

std::filesystem::path DatasetIndex::image_path(ImageId id) const {
  return root_ / image(id).file_name;
}

std::vector<ImageId> DatasetIndex::image_ids(Split split) const {
  std::vector<ImageId> ids;
  for (const ImageRecord& img : images_) {
    if (img.split == split) ids.push_back(img.id);
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

std::map<Split, SplitStats> DatasetIndex::stats() const {
  std::map<Split, SplitStats> out;
  for (Split s : {Split::kTrain, Split::kVal, Split::kTest, Split::kUnlabeled}) {
    out[s] = SplitStats{};
  }
  for (const ImageRecord& img : images_) ++out[img.split].images;
  for (const AnnotationRecord& a : annotations_) {
    ++out[image(a.image_id).split].instances;
  }
  return out;
}

AnnotationsByImage DatasetIndex::boxes(Split split) const {
  AnnotationsByImage out;
  for (ImageId id : image_ids(split)) {
    auto& list = out[id];
    for (const AnnotationRecord* a : annotations_of(id)) list.push_back(a->box);
  }
  return out;
}

GroundTruthSet DatasetIndex::ground_truth(Split split) const {
  GroundTruthSet gts;
  for (ImageId id : image_ids(split)) {
    auto& list = gts.images[id];
    for (const AnnotationRecord* a : annotations_of(id)) {
      list.push_back(Annotation{a->id, a->box, a->properties});
    }
  }
  return gts;
}

namespace {

const json& require(const json& obj, const char* key, const std::string& at) {
  auto it = obj.find(key);
  if (it == obj.end()) throw SchemaError(at + "." + key, "missing field");
  return *it;
}

std::int64_t require_int(const json& obj, const char* key,
                         const std::string& at) {
  const json& v = require(obj, key, at);
  if (!v.is_number_integer()) {
    throw SchemaError(at + "." + key, "expected an integer");
  }
  return v.get<std::int64_t>();
}

}  // namespace

DatasetIndex parse_dataset(const std::string& text,
                           const std::filesystem::path& root,
                           LoadOptions options) {
  json doc = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded()) throw SchemaError("$", "not valid JSON");
  if (!doc.is_object()) throw SchemaError("$", "expected an object");
  const json& schema = require(doc, "schema", "$");
  if (!schema.is_number_integer() || schema.get<int>() != 1) {
    throw SchemaError("$.schema", "unsupported schema version (expected 1)");
  }
  const json& images = require(doc, "images", "$");
  if (!images.is_array()) throw SchemaError("$.images", "expected an array");
  const json& anns = require(doc, "annotations", "$");
  if (!anns.is_array()) throw SchemaError("$.annotations", "expected an array");

  std::vector<ImageRecord> image_records;
  for (std::size_t i = 0; i < images.size(); ++i) {
    const std::string at = "$.images[" + std::to_string(i) + "]";
    const json& j = images[i];
    if (!j.is_object()) throw SchemaError(at, "expected an object");
    ImageRecord rec;
    rec.id = require_int(j, "id", at);
    const json& name = require(j, "file_name", at);
    if (!name.is_string()) throw SchemaError(at + ".file_name", "expected a string");
    rec.file_name = name.get<std::string>();
    rec.width = require_int(j, "width", at);
    rec.height = require_int(j, "height", at);
    const json& split = require(j, "split", at);
    if (!split.is_string()) throw SchemaError(at + ".split", "expected a string");
    try {
      rec.split = parse_split(split.get<std::string>());
    } catch (const InvalidArgument& e) {
      throw SchemaError(at + ".split", e.what());
    }
    image_records.push_back(std::move(rec));
  }

  std::vector<AnnotationRecord> ann_records;
  for (std::size_t i = 0; i < anns.size(); ++i) {
    const std::string at = "$.annotations[" + std::to_string(i) + "]";
    const json& j = anns[i];
    if (!j.is_object()) throw SchemaError(at, "expected an object");
    const std::int64_t id = require_int(j, "id", at);
    const std::int64_t image_id = require_int(j, "image_id", at);
    const json& bbox = require(j, "bbox", at);
    if (!bbox.is_array() || bbox.size() != 4) {
      throw SchemaError(at + ".bbox", "expected [x, y, w, h]");
    }
    double v[4];
    for (std::size_t k = 0; k < 4; ++k) {
      if (!bbox[k].is_number()) {
        throw SchemaError(at + ".bbox[" + std::to_string(k) + "]",
                          "expected a number");
      }
      v[k] = bbox[k].get<double>();
    }
    std::optional<BoundingBox> box;
    try {
      box.emplace(v[0], v[1], v[2], v[3]);
    } catch (const InvalidArgument& e) {
      throw SchemaError(at + ".bbox", e.what());
    }
    std::map<std::string, double> props;
    if (auto p = j.find("properties"); p != j.end()) {
      if (!p->is_object()) {
        throw SchemaError(at + ".properties", "expected an object");
      }
      for (const auto& [name, value] : p->items()) {
        if (!value.is_number()) {
          throw SchemaError(at + ".properties." + name, "expected a number");
        }
        props[name] = value.get<double>();
      }
    }
    ann_records.push_back(AnnotationRecord{id, image_id, *box, std::move(props)});
  }

  DatasetIndex index(std::move(image_records), std::move(ann_records), root);
  if (options.verify_images) {
    for (const ImageRecord& img : index.images()) {
      const auto path = root / img.file_name;
      if (!std::filesystem::exists(path)) throw MissingImage(path.string());
    }
  }
  return index;
}

DatasetIndex load_dataset(const std::filesystem::path& manifest,
                          LoadOptions options) {
  std::ifstream in(manifest);
  if (!in) throw IoError("cannot open manifest " + manifest.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_dataset(buffer.str(), manifest.parent_path(), options);
}

std::string dump_dataset(const DatasetIndex& index) {
  json images = json::array();
  for (const ImageRecord& img : index.images()) {
    images.push_back({{"id", img.id},
                      {"file_name", img.file_name},
                      {"width", img.width},
                      {"height", img.height},
                      {"split", split_name(img.split)}});
  }
  json anns = json::array();
  for (const AnnotationRecord& a : index.annotations()) {
    json props = json::object();
    for (const auto& [name, value] : a.properties) props[name] = value;
    anns.push_back({{"id", a.id},
                    {"image_id", a.image_id},
                    {"bbox", {a.box.x(), a.box.y(), a.box.w(), a.box.h()}},
                    {"properties", props}});
  }
  json doc = {{"schema", 1}, {"images", images}, {"annotations", anns}};
  return doc.dump(1);
}

void save_dataset(const DatasetIndex& index,
                  const std::filesystem::path& manifest) {
  std::ofstream out(manifest);
  if (!out) throw IoError("cannot write manifest " + manifest.string());
  out << dump_dataset(index) << "\n";
}

AttentionSource attention_from_directory(const std::filesystem::path& dir) {
  return [dir](const ImageRecord& img) -> std::optional<AttentionMap> {
    const auto path = dir / (std::to_string(img.id) + ".attn.pgm");
    if (!std::filesystem::exists(path)) return std::nullopt;
    return read_attention_pgm(path, img.size(), img.id);
  };
}

TileCorpus build_unlabeled_corpus(const DatasetIndex& index,
                                  const AttentionSource& attention,
                                  const TilingConfig& cfg, int jobs) {
  cfg.validate();
  const std::vector<ImageId> ids = index.image_ids(Split::kUnlabeled);
  std::vector<std::optional<std::vector<Tile>>> per_image(ids.size());
  internal::parallel_for(ids.size(), jobs, [&](std::size_t i) {
    const ImageRecord& img = index.image(ids[i]);
    std::optional<AttentionMap> map = attention(img);
    if (!map) return;
    per_image[i] = select_tiles(full_resolution_mask(*map, cfg.tau), cfg,
                                img.size(), img.id);
  });

  TileCorpus corpus;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (!per_image[i]) {
      spdlog::warn("no attention map for unlabeled image {}; skipped", ids[i]);
      corpus.missing_maps.push_back(ids[i]);
      continue;
    }
    for (const Tile& t : *per_image[i]) corpus.tiles.push_back({ids[i], t});
  }
  return corpus;
}

std::vector<Point2> annotation_corners(const DatasetIndex& index, ImageId image) {
  std::vector<Point2> pts;
  for (const AnnotationRecord* a : index.annotations_of(image)) {
    const BoundingBox& b = a->box;
    pts.push_back({b.x(), b.y()});
    pts.push_back({b.right(), b.y()});
    pts.push_back({b.right(), b.bottom()});
    pts.push_back({b.x(), b.bottom()});
  }
  return pts;
}

namespace {

Polygon rectangle(const BoundingBox& b) {
  return {{b.x(), b.y()}, {b.right(), b.y()}, {b.right(), b.bottom()},
          {b.x(), b.bottom()}};
}

}  // namespace

PolygonSet alpha_gt_for_image(const DatasetIndex& index, ImageId image,
                              double alpha) {
  const auto anns = index.annotations_of(image);
  if (anns.empty()) {
    throw EmptyGroundTruth("image " + std::to_string(image) +
                           " has no annotations");
  }
  const std::vector<Point2> corners = annotation_corners(index, image);
  PolygonSet boxes;
  for (const AnnotationRecord* a : anns) boxes.polygons.push_back(rectangle(a->box));
  AlphaShape shape;
  try {
    shape = alpha_shape(corners, alpha);
  } catch (const DegenerateInput&) {
    return boxes;
  } catch (const EmptyShape&) {
    return boxes;
  }
  // Boxes with a corner outside every kept triangle are added as rectangles
  // so that the shape still covers every annotation.
  // Compared on the triangulation lattice, where coincident corners merge.
  auto key = [](const Point2& p) {
    return std::make_pair(std::round(p.x * 256.0), std::round(p.y * 256.0));
  };
  std::set<std::pair<double, double>> isolated;
  for (const Point2& p : shape.isolated_points) isolated.insert(key(p));
  for (const AnnotationRecord* a : anns) {
    const Polygon rect = rectangle(a->box);
    const bool loose = std::any_of(rect.begin(), rect.end(), [&](const Point2& p) {
      return isolated.count(key(p)) > 0;
    });
    if (loose) shape.shape.polygons.push_back(rect);
  }
  return shape.shape;
}

}  // namespace orchard
