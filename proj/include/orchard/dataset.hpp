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
#ifndef ORCHARD_DATASET_HPP_
#define ORCHARD_DATASET_HPP_

// Dataset manifest (COCO-flavoured JSON, "schema": 1):
//
//   {
//     "schema": 1,
//     "images": [{"id": 1, "file_name": "img_1.pgm", "width": 3840,
//                 "height": 2160, "split": "train"}],
//     "annotations": [{"id": 7, "image_id": 1, "bbox": [x, y, w, h],
//                      "properties": {"relative_size": 0.01}}]
//   }
//
// split is one of train, val, test, unlabeled. file_name is relative to the
// manifest's directory.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "orchard/alpha_shape.hpp"
#include "orchard/attention.hpp"
#include "orchard/detector.hpp"
#include "orchard/evaluation.hpp"
#include "orchard/geometry.hpp"
#include "orchard/tiling.hpp"

namespace orchard {

enum class Split { kTrain, kVal, kTest, kUnlabeled };

const char* split_name(Split split);
// Throws InvalidArgument for an unknown name.
Split parse_split(const std::string& name);

struct ImageRecord {
  ImageId id = 0;
  std::string file_name;
  std::int64_t width = 0;
  std::int64_t height = 0;
  Split split = Split::kTrain;

  ImageSize size() const { return ImageSize(width, height); }
  friend bool operator==(const ImageRecord&, const ImageRecord&) = default;
};

struct AnnotationRecord {
  std::int64_t id = 0;
  ImageId image_id = 0;
  BoundingBox box;
  std::map<std::string, double> properties;
  friend bool operator==(const AnnotationRecord&, const AnnotationRecord&) = default;
};

struct SplitStats {
  std::size_t images = 0;
  std::size_t instances = 0;
  friend bool operator==(const SplitStats&, const SplitStats&) = default;
};

class DatasetIndex {
 public:
  DatasetIndex() = default;
  // Validates all invariants; throws SchemaError.
  DatasetIndex(std::vector<ImageRecord> images,
               std::vector<AnnotationRecord> annotations,
               std::filesystem::path root = {});

  const std::vector<ImageRecord>& images() const { return images_; }
  const std::vector<AnnotationRecord>& annotations() const { return annotations_; }
  const std::filesystem::path& root() const { return root_; }

  // Throws InvalidArgument for an unknown id.
  const ImageRecord& image(ImageId id) const;
  std::vector<const AnnotationRecord*> annotations_of(ImageId id) const;
  std::filesystem::path image_path(ImageId id) const;

  std::vector<ImageId> image_ids(Split split) const;
  std::map<Split, SplitStats> stats() const;

  // Annotation boxes per image for the images of `split`.
  AnnotationsByImage boxes(Split split) const;
  GroundTruthSet ground_truth(Split split) const;

  friend bool operator==(const DatasetIndex& a, const DatasetIndex& b) {
    return a.images_ == b.images_ && a.annotations_ == b.annotations_;
  }

 private:
  std::vector<ImageRecord> images_;
  std::vector<AnnotationRecord> annotations_;
  std::filesystem::path root_;
  std::map<ImageId, std::size_t> image_pos_;
  std::map<ImageId, std::vector<std::size_t>> by_image_;
};

struct LoadOptions {
  // Throw MissingImage when a referenced image file does not exist.
  bool verify_images = true;
};

// Throws IoError, SchemaError (path points at the offending field) or
// MissingImage.
DatasetIndex load_dataset(const std::filesystem::path& manifest,
                          LoadOptions options = {});
DatasetIndex parse_dataset(const std::string& text,
                           const std::filesystem::path& root,
                           LoadOptions options = {});
std::string dump_dataset(const DatasetIndex& index);
void save_dataset(const DatasetIndex& index,
                  const std::filesystem::path& manifest);

struct CorpusEntry {
  ImageId image = 0;
  Tile tile;
  friend bool operator==(const CorpusEntry&, const CorpusEntry&) = default;
};

struct TileCorpus {
  std::vector<CorpusEntry> tiles;
  // Unlabeled images that had no attention map and were skipped.
  std::vector<ImageId> missing_maps;
  std::size_t warnings() const { return missing_maps.size(); }
};

// Returns the map for an image, or nullopt when none is available.
using AttentionSource =
    std::function<std::optional<AttentionMap>(const ImageRecord&)>;

// Reads "<dir>/<image_id>.attn.pgm" when present.
AttentionSource attention_from_directory(const std::filesystem::path& dir);

// Selected tiles of every unlabeled image, in image-id then tile-id order.
TileCorpus build_unlabeled_corpus(const DatasetIndex& index,
                                  const AttentionSource& attention,
                                  const TilingConfig& cfg, int jobs = 1);

// Corner points of all annotation boxes of the image.
std::vector<Point2> annotation_corners(const DatasetIndex& index, ImageId image);

// Alpha shape over the annotation corners; when the points are degenerate
// (e.g. a single apple) or no triangle survives, the union of the boxes as
// rectangles. Throws EmptyGroundTruth for an image without annotations.
PolygonSet alpha_gt_for_image(const DatasetIndex& index, ImageId image,
                              double alpha = 100.0);

}  // namespace orchard

#endif  // ORCHARD_DATASET_HPP_
