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
#include "orchard/tiling.hpp"

#include <algorithm>

#include "orchard/errors.hpp"

namespace orchard {

void TilingConfig::validate() const {
  if (tile_size <= 0 || stride <= 0 || stride > tile_size) {
    throw InvalidArgument("tiling needs 0 < stride <= tile_size");
  }
  if (!(tau >= 0.0 && tau < 1.0)) {
    throw InvalidArgument("tau must lie in [0, 1)");
  }
  if (!(coverage_min > 0.0 && coverage_min <= 1.0)) {
    throw InvalidArgument("coverage_min must lie in (0, 1]");
  }
}

std::vector<std::int64_t> axis_origins(std::int64_t extent,
                                       const TilingConfig& cfg) {
  std::vector<std::int64_t> origins;
  const std::int64_t last = extent - cfg.tile_size;
  if (last <= 0) {
    origins.push_back(0);
    return origins;
  }
  for (std::int64_t o = 0; o <= last; o += cfg.stride) origins.push_back(o);
  if (origins.back() != last) origins.push_back(last);
  return origins;
}

std::vector<Tile> tile_grid(ImageSize size, const TilingConfig& cfg,
                            ImageId image) {
  cfg.validate();
  const auto xs = axis_origins(size.width, cfg);
  const auto ys = axis_origins(size.height, cfg);
  const std::int64_t tw = std::min(cfg.tile_size, size.width);
  const std::int64_t th = std::min(cfg.tile_size, size.height);
  std::vector<Tile> tiles;
  tiles.reserve(xs.size() * ys.size());
  TileId id = 0;
  for (std::int64_t y : ys) {
    for (std::int64_t x : xs) {
      tiles.push_back(Tile{id++, x, y, tw, th, image});
    }
  }
  return tiles;
}

MaskIntegral::MaskIntegral(const BinaryMask& mask) : size_(mask.size()) {
  const std::int64_t w = size_.width;
  const std::int64_t h = size_.height;
  sums_.assign(static_cast<std::size_t>((w + 1) * (h + 1)), 0);
  for (std::int64_t y = 0; y < h; ++y) {
    std::int64_t row = 0;
    for (std::int64_t x = 0; x < w; ++x) {
      row += mask.at(x, y) ? 1 : 0;
      sums_[static_cast<std::size_t>((y + 1) * (w + 1) + x + 1)] =
          sums_[static_cast<std::size_t>(y * (w + 1) + x + 1)] + row;
    }
  }
}

std::int64_t MaskIntegral::count(std::int64_t x0, std::int64_t y0,
                                 std::int64_t x1, std::int64_t y1) const {
  const std::int64_t w = size_.width;
  x0 = std::clamp<std::int64_t>(x0, 0, w);
  x1 = std::clamp<std::int64_t>(x1, 0, w);
  y0 = std::clamp<std::int64_t>(y0, 0, size_.height);
  y1 = std::clamp<std::int64_t>(y1, 0, size_.height);
  if (x1 <= x0 || y1 <= y0) return 0;
  auto at = [&](std::int64_t x, std::int64_t y) {
    return sums_[static_cast<std::size_t>(y * (w + 1) + x)];
  };
  return at(x1, y1) - at(x0, y1) - at(x1, y0) + at(x0, y0);
}

double coverage_fraction(const MaskIntegral& integral, const Tile& tile) {
  const std::int64_t set =
      integral.count(tile.x, tile.y, tile.x + tile.w, tile.y + tile.h);
  return static_cast<double>(set) / static_cast<double>(tile.area());
}

double coverage_fraction(const BinaryMask& mask, const Tile& tile) {
  std::int64_t set = 0;
  const std::int64_t x1 = std::min(tile.x + tile.w, mask.width());
  const std::int64_t y1 = std::min(tile.y + tile.h, mask.height());
  for (std::int64_t y = std::max<std::int64_t>(tile.y, 0); y < y1; ++y) {
    for (std::int64_t x = std::max<std::int64_t>(tile.x, 0); x < x1; ++x) {
      set += mask.at(x, y) ? 1 : 0;
    }
  }
  return static_cast<double>(set) / static_cast<double>(tile.area());
}

std::vector<Tile> select_tiles(const BinaryMask& mask, const TilingConfig& cfg,
                               ImageSize size, ImageId image) {
  if (mask.size() != size) {
    throw SizeError("tile selection needs the mask at image resolution");
  }
  const MaskIntegral integral(mask);
  std::vector<Tile> selected;
  for (const Tile& t : tile_grid(size, cfg, image)) {
    if (coverage_fraction(integral, t) > cfg.coverage_min) selected.push_back(t);
  }
  return selected;
}

}  // namespace orchard
