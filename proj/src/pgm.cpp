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
#include "orchard/pgm.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "orchard/errors.hpp"

namespace orchard {

namespace {

// Reads the next header token, collecting "# scale <v>" comments on the way.
std::string next_token(std::istream& in, PgmHeader& header) {
  std::string token;
  for (;;) {
    int c = in.peek();
    if (c == EOF) break;
    if (c == '#') {
      std::string comment;
      std::getline(in, comment);
      std::istringstream cs(comment.substr(1));
      std::string key;
      double value = 0.0;
      if (cs >> key >> value && key == "scale") header.scale = value;
      continue;
    }
    if (std::isspace(c)) {
      in.get();
      if (!token.empty()) break;
      continue;
    }
    token.push_back(static_cast<char>(in.get()));
  }
  return token;
}

std::int64_t parse_positive(const std::string& token,
                            const std::filesystem::path& path) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(token, &used);
    if (used == token.size() && v > 0) return v;
  } catch (const std::exception&) {
  }
  throw IoError("malformed PGM header in " + path.string());
}

}  // namespace

GrayImage read_pgm(const std::filesystem::path& path, PgmHeader* header_out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  PgmHeader header;
  if (next_token(in, header) != "P5") {
    throw IoError("not a binary PGM (P5): " + path.string());
  }
  header.width = parse_positive(next_token(in, header), path);
  header.height = parse_positive(next_token(in, header), path);
  header.max_value =
      static_cast<int>(parse_positive(next_token(in, header), path));
  if (header.max_value > 255) {
    throw IoError("only 8-bit PGM is supported: " + path.string());
  }
  GrayImage image;
  image.width = header.width;
  image.height = header.height;
  image.pixels.resize(static_cast<std::size_t>(header.width * header.height));
  in.read(reinterpret_cast<char*>(image.pixels.data()),
          static_cast<std::streamsize>(image.pixels.size()));
  if (in.gcount() != static_cast<std::streamsize>(image.pixels.size())) {
    throw IoError("truncated PGM data in " + path.string());
  }
  if (header_out) *header_out = header;
  return image;
}

void write_pgm(const std::filesystem::path& path, const GrayImage& image,
               std::optional<double> scale) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << "P5\n";
  if (scale) {
    std::ostringstream s;
    s.precision(17);
    s << *scale;
    out << "# scale " << s.str() << "\n";
  }
  out << image.width << " " << image.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(image.pixels.data()),
            static_cast<std::streamsize>(image.pixels.size()));
  if (!out) throw IoError("failed writing " + path.string());
}

void write_mask_pgm(const std::filesystem::path& path, const BinaryMask& mask) {
  GrayImage image{mask.width(), mask.height(), {}};
  image.pixels.reserve(mask.bits().size());
  for (std::uint8_t b : mask.bits()) image.pixels.push_back(b ? 255 : 0);
  write_pgm(path, image);
}

void write_attention_pgm(const std::filesystem::path& path,
                         const AttentionMap& map) {
  GrayImage image{map.width(), map.height(), {}};
  image.pixels.reserve(map.values().size());
  for (double v : map.values()) {
    image.pixels.push_back(static_cast<std::uint8_t>(std::lround(v * 255.0)));
  }
  write_pgm(path, image, map.scale());
}

AttentionMap read_attention_pgm(const std::filesystem::path& path,
                                ImageSize image_size, ImageId image) {
  PgmHeader header;
  GrayImage gray = read_pgm(path, &header);
  if (!header.scale) {
    throw IoError("attention map lacks a '# scale' comment: " + path.string());
  }
  AttentionMap map(image_size, *header.scale, image);
  if (map.width() != gray.width || map.height() != gray.height) {
    throw IoError("attention map grid does not match image size at scale: " +
                  path.string());
  }
  const double max_value = header.max_value;
  for (std::int64_t y = 0; y < gray.height; ++y) {
    for (std::int64_t x = 0; x < gray.width; ++x) {
      map.set(x, y, gray.at(x, y) / max_value);
    }
  }
  return map;
}

std::vector<std::uint8_t> crop(const GrayImage& image, const BoundingBox& box) {
  const auto x0 = std::clamp<std::int64_t>(
      static_cast<std::int64_t>(std::floor(box.x())), 0, image.width);
  const auto y0 = std::clamp<std::int64_t>(
      static_cast<std::int64_t>(std::floor(box.y())), 0, image.height);
  const auto x1 = std::clamp<std::int64_t>(
      static_cast<std::int64_t>(std::ceil(box.right())), 0, image.width);
  const auto y1 = std::clamp<std::int64_t>(
      static_cast<std::int64_t>(std::ceil(box.bottom())), 0, image.height);
  std::vector<std::uint8_t> out;
  out.reserve(static_cast<std::size_t>(std::max<std::int64_t>(0, (x1 - x0) * (y1 - y0))));
  for (std::int64_t y = y0; y < y1; ++y) {
    for (std::int64_t x = x0; x < x1; ++x) out.push_back(image.at(x, y));
  }
  return out;
}

}  // namespace orchard
