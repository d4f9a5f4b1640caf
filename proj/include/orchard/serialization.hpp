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
#ifndef ORCHARD_SERIALIZATION_HPP_
#define ORCHARD_SERIALIZATION_HPP_

// JSON and CSV encodings of the library's value types.
//
//   polygons:    {"polygons": [[[x, y], ...], ...]}
//   tiles:       {"image_id": 3, "tiles": [{"id", "x", "y", "w", "h"}]}
//   detections:  {"image_id": 3, "detections": [{"x", "y", "w", "h", "score"}]}
//   pseudo:      {"image_id": 3, "detections": [{"x", "y", "w", "h"}]}
//   bins (CSV):  range_lo,range_hi,count,ar

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "orchard/alpha_shape.hpp"
#include "orchard/dataset.hpp"
#include "orchard/evaluation.hpp"
#include "orchard/geometry.hpp"
#include "orchard/semisup.hpp"
#include "orchard/tiling.hpp"

namespace orchard {

nlohmann::json to_json(const PolygonSet& shape);
// Throws InvalidArgument on a malformed document.
PolygonSet polygon_set_from_json(const nlohmann::json& j);

nlohmann::json tiles_to_json(ImageId image, const std::vector<Tile>& tiles);
std::vector<Tile> tiles_from_json(const nlohmann::json& j);

nlohmann::json detections_to_json(ImageId image,
                                  const std::vector<Detection>& dets);
// Detections are returned in the ImageGlobal frame of the document's image.
std::vector<Detection> detections_from_json(const nlohmann::json& j);
ImageId image_id_of(const nlohmann::json& j);

nlohmann::json pseudo_labels_to_json(ImageId image,
                                     const std::vector<BoundingBox>& boxes);

nlohmann::json to_json(const EvalResult& result);
nlohmann::json to_json(const BinCurve& curve);
std::string to_csv(const BinCurve& curve);

nlohmann::json to_json(const TrainSchedule& sched);
// Missing keys keep their defaults.
TrainSchedule schedule_from_json(const nlohmann::json& j);
nlohmann::json to_json(const BatchManifest& batch);

nlohmann::json to_json(const TileCorpus& corpus);

// Reads a whole file as JSON; throws IoError.
nlohmann::json read_json(const std::filesystem::path& path);
// Writes `j.dump(indent)` plus a newline; throws IoError.
void write_json(const std::filesystem::path& path, const nlohmann::json& j,
                int indent = 1);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace orchard

#endif  // ORCHARD_SERIALIZATION_HPP_
