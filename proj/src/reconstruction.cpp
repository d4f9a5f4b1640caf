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
#include "orchard/reconstruction.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "orchard/errors.hpp"

namespace orchard {

void ReconstructionConfig::validate(std::int64_t tile_size) const {
  if (!(band >= 0.0 && band < static_cast<double>(tile_size) / 2.0)) {
    throw InvalidArgument("band must lie in [0, tile_size / 2)");
  }
  if (!(nms_iou > 0.0 && nms_iou < 1.0)) {
    throw InvalidArgument("nms iou threshold must lie in (0, 1)");
  }
}

BoundingBox inner_region(const Tile& tile, ImageSize image, double band) {
  const double left = tile.x == 0 ? 0.0 : band;
  const double top = tile.y == 0 ? 0.0 : band;
  const double right = tile.x + tile.w >= image.width ? 0.0 : band;
  const double bottom = tile.y + tile.h >= image.height ? 0.0 : band;
  return BoundingBox(left, top, static_cast<double>(tile.w) - left - right,
                     static_cast<double>(tile.h) - top - bottom);
}

std::vector<Detection> border_filter(const std::vector<Detection>& dets,
                                     const Tile& tile, ImageSize image,
                                     double band) {
  const BoundingBox inner = inner_region(tile, image, band);
  std::vector<Detection> kept;
  for (const Detection& d : dets) {
    if (!d.is_tile_local()) {
      throw FrameError("border_filter expects tile-local detections");
    }
    if (inner.contains(d.box())) kept.push_back(d);
  }
  return kept;
}

bool nms_order(const Detection& a, const Detection& b) {
  if (a.score() != b.score()) return a.score() > b.score();
  return lexicographic_less(a.box(), b.box());
}

std::vector<Detection> nms(const std::vector<Detection>& dets,
                           double threshold) {
  for (std::size_t i = 1; i < dets.size(); ++i) {
    require_same_frame(dets[0], dets[i]);
  }
  std::vector<Detection> ranked = dets;
  std::stable_sort(ranked.begin(), ranked.end(), nms_order);
  const std::size_t n = ranked.size();

  // Candidates for overlap with a kept box are found through an index sorted
  // by left edge: only boxes with x in (kept.x - max_w, kept.right) can
  // intersect it.
  std::vector<std::size_t> by_x(n);
  std::iota(by_x.begin(), by_x.end(), std::size_t{0});
  std::sort(by_x.begin(), by_x.end(), [&](std::size_t a, std::size_t b) {
    return ranked[a].box().x() < ranked[b].box().x();
  });
  double max_w = 0.0;
  for (const Detection& d : ranked) max_w = std::max(max_w, d.box().w());

  std::vector<char> suppressed(n, 0);
  std::vector<Detection> out;
  for (std::size_t i = 0; i < n; ++i) {
    if (suppressed[i]) continue;
    const BoundingBox& kept = ranked[i].box();
    out.push_back(ranked[i]);
    auto lo = std::upper_bound(
        by_x.begin(), by_x.end(), kept.x() - max_w,
        [&](double v, std::size_t k) { return v < ranked[k].box().x(); });
    for (auto it = lo; it != by_x.end(); ++it) {
      const std::size_t j = *it;
      if (ranked[j].box().x() >= kept.right()) break;
      if (j <= i || suppressed[j]) continue;
      if (iou(kept, ranked[j].box()) > threshold) suppressed[j] = 1;
    }
  }
  return out;
}

std::vector<Detection> reconstruct(const PerTileDetections& per_tile,
                                   const std::vector<Tile>& tiles,
                                   ImageSize image, ImageId image_id,
                                   const ReconstructionConfig& cfg,
                                   ReconstructionStats* stats) {
  std::map<TileId, const Tile*> by_id;
  for (const Tile& t : tiles) by_id[t.id] = &t;

  std::vector<Detection> merged;
  std::size_t raw = 0;
  for (const auto& [tile_id, dets] : per_tile) {
    auto it = by_id.find(tile_id);
    if (it == by_id.end()) {
      throw InvariantViolation("detections for unknown tile " +
                               std::to_string(tile_id));
    }
    const Tile& tile = *it->second;
    const BoundingBox local(0.0, 0.0, static_cast<double>(tile.w),
                            static_cast<double>(tile.h));
    for (const Detection& d : dets) {
      if (!local.contains(d.box())) {
        std::ostringstream os;
        os << "detection " << d.box() << " lies outside tile " << tile_id;
        throw InvariantViolation(os.str());
      }
    }
    raw += dets.size();
    for (const Detection& d : border_filter(dets, tile, image, cfg.band)) {
      merged.push_back(translate(d, tile.origin(), ImageGlobal{image_id}));
    }
  }
  std::vector<Detection> kept = nms(merged, cfg.nms_iou);
  if (stats) *stats = {raw, merged.size(), kept.size()};
  return kept;
}

}  // namespace orchard
