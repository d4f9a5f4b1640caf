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
#ifndef ORCHARD_PGM_HPP_
#define ORCHARD_PGM_HPP_

// Binary 8-bit PGM ("P5") reading and writing for grayscale images, masks and
// attention maps. Attention maps carry their scale in a header comment:
//
//   P5
//   # scale 0.25
//   960 540
//   255
//   <width * height bytes>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "orchard/attention.hpp"
#include "orchard/geometry.hpp"

namespace orchard {

struct GrayImage {
  std::int64_t width = 0;
  std::int64_t height = 0;
  std::vector<std::uint8_t> pixels;

  std::uint8_t at(std::int64_t x, std::int64_t y) const {
    return pixels[static_cast<std::size_t>(y * width + x)];
  }
};

struct PgmHeader {
  std::int64_t width = 0;
  std::int64_t height = 0;
  int max_value = 255;
  std::optional<double> scale;
};

// Throws IoError on unreadable or malformed files (only maxval <= 255).
GrayImage read_pgm(const std::filesystem::path& path,
                   PgmHeader* header = nullptr);
void write_pgm(const std::filesystem::path& path, const GrayImage& image,
               std::optional<double> scale = std::nullopt);

// Mask bits as 0 / 255.
void write_mask_pgm(const std::filesystem::path& path, const BinaryMask& mask);

// Values quantized to round(v * 255), with the scale comment.
void write_attention_pgm(const std::filesystem::path& path,
                         const AttentionMap& map);

// Reads a map written by write_attention_pgm. The scale comment is required
// and the grid must match `image_size` at that scale.
AttentionMap read_attention_pgm(const std::filesystem::path& path,
                                ImageSize image_size, ImageId image);

// Grayscale pixels of the box rectangle (rounded outward, clamped).
std::vector<std::uint8_t> crop(const GrayImage& image, const BoundingBox& box);

}  // namespace orchard

#endif  // ORCHARD_PGM_HPP_
