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
#ifndef ORCHARD_TILING_HPP_
#define ORCHARD_TILING_HPP_

#include <cstdint>
#include <vector>

#include "orchard/attention.hpp"
#include "orchard/geometry.hpp"

namespace orchard {

struct Tile {
  TileId id = 0;
  std::int64_t x = 0;
  std::int64_t y = 0;
  std::int64_t w = 0;
  std::int64_t h = 0;
  ImageId image = 0;

  BoundingBox rect() const {
    return BoundingBox(static_cast<double>(x), static_cast<double>(y),
                       static_cast<double>(w), static_cast<double>(h));
  }
  PixelOffset origin() const {
    return {static_cast<double>(x), static_cast<double>(y)};
  }
  std::int64_t area() const { return w * h; }

  friend bool operator==(const Tile&, const Tile&) = default;
};

struct TilingConfig {
  std::int64_t tile_size = 800;
  std::int64_t stride = 400;
  // Attention binarization threshold.
  double tau = 0.3;
  // A tile is selected when its set-bit fraction is strictly above this.
  double coverage_min = 0.2;

  // Throws InvalidArgument when 0 < stride <= tile_size, 0 <= tau < 1 or
  // 0 < coverage_min <= 1 is violated.
  void validate() const;
};

// Window origins along one axis: multiples of stride up to extent - tile, plus
// a final origin clamped to extent - tile when that is not a stride multiple.
std::vector<std::int64_t> axis_origins(std::int64_t extent,
                                       const TilingConfig& cfg);

// Row-major sliding-window grid; ids count from 0. Axes shorter than the tile
// get the single origin 0 and a tile clamped to the image extent.
std::vector<Tile> tile_grid(ImageSize size, const TilingConfig& cfg,
                            ImageId image = 0);

// Summed-area table over a full-resolution mask for O(1) rectangle counts.
class MaskIntegral {
 public:
  explicit MaskIntegral(const BinaryMask& mask);
  // Set bits in [x0, x1) x [y0, y1), clamped to the mask.
  std::int64_t count(std::int64_t x0, std::int64_t y0, std::int64_t x1,
                     std::int64_t y1) const;
  const ImageSize& size() const { return size_; }

 private:
  ImageSize size_;
  std::vector<std::int64_t> sums_;
};

// Fraction of the tile's pixels that are set in the image-resolution mask.
double coverage_fraction(const BinaryMask& mask, const Tile& tile);
double coverage_fraction(const MaskIntegral& integral, const Tile& tile);

// Grid tiles whose coverage is strictly above cfg.coverage_min, in grid order.
// Throws SizeError when the mask is not at image resolution.
std::vector<Tile> select_tiles(const BinaryMask& mask, const TilingConfig& cfg,
                               ImageSize size, ImageId image = 0);

}  // namespace orchard

#endif  // ORCHARD_TILING_HPP_
