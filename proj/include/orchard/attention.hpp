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
#ifndef ORCHARD_ATTENTION_HPP_
#define ORCHARD_ATTENTION_HPP_

#include <cstddef>
#include <cstdint>
#include <vector>

#include "orchard/alpha_shape.hpp"
#include "orchard/geometry.hpp"

namespace orchard {

// Default resolution of attention maps relative to the image.
inline constexpr double kDefaultAttentionScale = 0.25;

// Number of map cells along an image axis of `extent` pixels at `scale`.
std::int64_t scaled_extent(std::int64_t extent, double scale);

// Dense relevance grid with values in [0, 1] (1 = high attention). Grid
// dimensions are ceil(image dims * scale).
class AttentionMap {
 public:
  // All-zero map. Throws InvalidArgument unless 0 < scale <= 1.
  AttentionMap(ImageSize image_size, double scale, ImageId image = 0);

  std::int64_t width() const { return width_; }
  std::int64_t height() const { return height_; }
  double scale() const { return scale_; }
  ImageId image() const { return image_; }
  const ImageSize& image_size() const { return image_size_; }

  double at(std::int64_t x, std::int64_t y) const {
    return values_[static_cast<std::size_t>(y * width_ + x)];
  }
  // Throws InvalidArgument for values outside [0, 1].
  void set(std::int64_t x, std::int64_t y, double value);
  void fill(double value);

  const std::vector<double>& values() const { return values_; }

 private:
  ImageSize image_size_;
  double scale_;
  ImageId image_;
  std::int64_t width_;
  std::int64_t height_;
  std::vector<double> values_;
};

class BinaryMask {
 public:
  explicit BinaryMask(ImageSize size, bool value = false);

  const ImageSize& size() const { return size_; }
  std::int64_t width() const { return size_.width; }
  std::int64_t height() const { return size_.height; }

  bool at(std::int64_t x, std::int64_t y) const {
    return bits_[static_cast<std::size_t>(y * size_.width + x)] != 0;
  }
  void set(std::int64_t x, std::int64_t y, bool value) {
    bits_[static_cast<std::size_t>(y * size_.width + x)] = value ? 1 : 0;
  }
  // Sets every bit inside the pixel rectangle [x0, x1) x [y0, y1), clamped.
  void fill_rect(std::int64_t x0, std::int64_t y0, std::int64_t x1,
                 std::int64_t y1, bool value = true);

  std::int64_t count() const;
  const std::vector<std::uint8_t>& bits() const { return bits_; }

  friend bool operator==(const BinaryMask&, const BinaryMask&) = default;

 private:
  ImageSize size_;
  std::vector<std::uint8_t> bits_;
};

// Cell (i, j) is 1 exactly when its center ((i + 0.5) / scale,
// (j + 0.5) / scale) lies inside or on the boundary of any polygon.
AttentionMap rasterize(const PolygonSet& shape, ImageSize size, double scale,
                       ImageId image = 0);

// Bit set iff value > tau.
BinaryMask binarize(const AttentionMap& map, double tau);

// Nearest-neighbour upsampling. Throws SizeError when `target` is smaller than
// the mask in either dimension.
BinaryMask upsample_nearest(const BinaryMask& mask, ImageSize target);

// binarize followed by upsample_nearest to the map's image size.
BinaryMask full_resolution_mask(const AttentionMap& map, double tau);

}  // namespace orchard

#endif  // ORCHARD_ATTENTION_HPP_
