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
#include "orchard/attention.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "orchard/errors.hpp"

namespace orchard {

std::int64_t scaled_extent(std::int64_t extent, double scale) {
  const double cells = std::ceil(static_cast<double>(extent) * scale - 1e-9);
  return std::max<std::int64_t>(1, static_cast<std::int64_t>(cells));
}

AttentionMap::AttentionMap(ImageSize image_size, double scale, ImageId image)
    : image_size_(image_size), scale_(scale), image_(image) {
  if (!(scale > 0.0 && scale <= 1.0)) {
    throw InvalidArgument("attention scale must lie in (0, 1]");
  }
  width_ = scaled_extent(image_size.width, scale);
  height_ = scaled_extent(image_size.height, scale);
  values_.assign(static_cast<std::size_t>(width_ * height_), 0.0);
}

void AttentionMap::set(std::int64_t x, std::int64_t y, double value) {
  if (!(value >= 0.0 && value <= 1.0)) {
    throw InvalidArgument("attention values must lie in [0, 1]");
  }
  values_[static_cast<std::size_t>(y * width_ + x)] = value;
}

void AttentionMap::fill(double value) {
  if (!(value >= 0.0 && value <= 1.0)) {
    throw InvalidArgument("attention values must lie in [0, 1]");
  }
  std::fill(values_.begin(), values_.end(), value);
}

BinaryMask::BinaryMask(ImageSize size, bool value)
    : size_(size),
      bits_(static_cast<std::size_t>(size.pixel_count()), value ? 1 : 0) {}

void BinaryMask::fill_rect(std::int64_t x0, std::int64_t y0, std::int64_t x1,
                           std::int64_t y1, bool value) {
  x0 = std::clamp<std::int64_t>(x0, 0, size_.width);
  x1 = std::clamp<std::int64_t>(x1, 0, size_.width);
  y0 = std::clamp<std::int64_t>(y0, 0, size_.height);
  y1 = std::clamp<std::int64_t>(y1, 0, size_.height);
  for (std::int64_t y = y0; y < y1; ++y) {
    auto row = bits_.begin() + y * size_.width;
    std::fill(row + x0, row + x1, value ? 1 : 0);
  }
}

std::int64_t BinaryMask::count() const {
  return std::accumulate(bits_.begin(), bits_.end(), std::int64_t{0});
}

namespace {

struct Span {
  double lo;
  double hi;
};

// Closed x-intervals of the polygon at height y: even-odd crossings of
// non-horizontal edges (half-open in y), plus horizontal edges and vertices
// lying exactly on the line so that boundary points count as inside.
void row_spans(const Polygon& poly, double y, std::vector<Span>& out) {
  std::vector<double> xs;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point2& a = poly[i];
    const Point2& b = poly[(i + 1) % n];
    if (a.y == b.y) {
      if (a.y == y) out.push_back({std::min(a.x, b.x), std::max(a.x, b.x)});
      continue;
    }
    if (a.y == y) out.push_back({a.x, a.x});
    const double ylo = std::min(a.y, b.y);
    const double yhi = std::max(a.y, b.y);
    if (y >= ylo && y < yhi) {
      xs.push_back(a.x + (y - a.y) * (b.x - a.x) / (b.y - a.y));
    }
  }
  std::sort(xs.begin(), xs.end());
  for (std::size_t i = 0; i + 1 < xs.size(); i += 2) {
    out.push_back({xs[i], xs[i + 1]});
  }
}

}  // namespace

AttentionMap rasterize(const PolygonSet& shape, ImageSize size, double scale,
                       ImageId image) {
  AttentionMap map(size, scale, image);
  const std::int64_t w = map.width();
  std::vector<Span> spans;
  for (std::int64_t j = 0; j < map.height(); ++j) {
    const double yc = (static_cast<double>(j) + 0.5) / scale;
    spans.clear();
    for (const Polygon& poly : shape.polygons) row_spans(poly, yc, spans);
    for (const Span& s : spans) {
      // First and last cell whose center lies in [lo, hi].
      auto center = [scale](std::int64_t i) {
        return (static_cast<double>(i) + 0.5) / scale;
      };
      std::int64_t i0 = static_cast<std::int64_t>(std::ceil(s.lo * scale - 0.5));
      while (center(i0) < s.lo) ++i0;
      while (center(i0 - 1) >= s.lo) --i0;
      std::int64_t i1 = static_cast<std::int64_t>(std::floor(s.hi * scale - 0.5));
      while (center(i1) > s.hi) --i1;
      while (center(i1 + 1) <= s.hi) ++i1;
      i0 = std::max<std::int64_t>(i0, 0);
      i1 = std::min<std::int64_t>(i1, w - 1);
      for (std::int64_t i = i0; i <= i1; ++i) map.set(i, j, 1.0);
    }
  }
  return map;
}

BinaryMask binarize(const AttentionMap& map, double tau) {
  BinaryMask mask(ImageSize(map.width(), map.height()));
  for (std::int64_t y = 0; y < map.height(); ++y) {
    for (std::int64_t x = 0; x < map.width(); ++x) {
      if (map.at(x, y) > tau) mask.set(x, y, true);
    }
  }
  return mask;
}

BinaryMask upsample_nearest(const BinaryMask& mask, ImageSize target) {
  if (target.width < mask.width() || target.height < mask.height()) {
    throw SizeError("upsample_nearest cannot shrink a mask");
  }
  BinaryMask out(target);
  // Source index of each target column/row: the cell whose span contains the
  // target pixel center.
  auto source_index = [](std::int64_t t, std::int64_t src, std::int64_t dst) {
    return std::min<std::int64_t>(src - 1, ((2 * t + 1) * src) / (2 * dst));
  };
  std::vector<std::int64_t> col(static_cast<std::size_t>(target.width));
  for (std::int64_t x = 0; x < target.width; ++x) {
    col[static_cast<std::size_t>(x)] = source_index(x, mask.width(), target.width);
  }
  for (std::int64_t y = 0; y < target.height; ++y) {
    const std::int64_t sy = source_index(y, mask.height(), target.height);
    for (std::int64_t x = 0; x < target.width; ++x) {
      if (mask.at(col[static_cast<std::size_t>(x)], sy)) out.set(x, y, true);
    }
  }
  return out;
}

BinaryMask full_resolution_mask(const AttentionMap& map, double tau) {
  return upsample_nearest(binarize(map, tau), map.image_size());
}

}  // namespace orchard
