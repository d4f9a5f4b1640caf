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
#ifndef ORCHARD_RECONSTRUCTION_HPP_
#define ORCHARD_RECONSTRUCTION_HPP_

#include <cstddef>
#include <map>
#include <vector>

#include "orchard/geometry.hpp"
#include "orchard/tiling.hpp"

namespace orchard {

struct ReconstructionConfig {
  // Width of the per-tile border band in pixels.
  double band = 100.0;
  double nms_iou = 0.5;

  // Throws InvalidArgument unless 0 <= band < tile_size / 2 and
  // 0 < nms_iou < 1.
  void validate(std::int64_t tile_size) const;
};

// Tile-local rectangle in which detections are kept: the tile inset by `band`
// on every side that does not coincide with the image edge.
BoundingBox inner_region(const Tile& tile, ImageSize image, double band);

// Keeps the tile-local detections that lie fully inside the inner region.
std::vector<Detection> border_filter(const std::vector<Detection>& dets,
                                     const Tile& tile, ImageSize image,
                                     double band);

// Order used by nms: score descending, then lexicographic (x, y, w, h).
bool nms_order(const Detection& a, const Detection& b);

// Greedy class-agnostic non-maximum suppression: the best remaining detection
// suppresses every remaining one with iou > threshold. Output is in nms_order.
// Throws FrameError for mixed frames.
std::vector<Detection> nms(const std::vector<Detection>& dets,
                           double threshold);

using PerTileDetections = std::map<TileId, std::vector<Detection>>;

struct ReconstructionStats {
  std::size_t raw = 0;           // detections handed in
  std::size_t before_nms = 0;    // after the border filter
  std::size_t after_nms = 0;
};

// Border-filters each tile's detections, maps them to the image frame,
// concatenates in tile-id order and applies nms. Throws InvariantViolation when
// a key is not a listed tile or a detection lies outside its tile.
std::vector<Detection> reconstruct(const PerTileDetections& per_tile,
                                   const std::vector<Tile>& tiles,
                                   ImageSize image, ImageId image_id,
                                   const ReconstructionConfig& cfg,
                                   ReconstructionStats* stats = nullptr);

}  // namespace orchard

#endif  // ORCHARD_RECONSTRUCTION_HPP_
