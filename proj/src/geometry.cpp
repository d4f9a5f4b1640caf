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
#include "orchard/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <tuple>

#include "orchard/errors.hpp"

namespace orchard {

BoundingBox::BoundingBox(double x, double y, double w, double h)
    : x_(x), y_(y), w_(w), h_(h) {
  if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(w) ||
      !std::isfinite(h)) {
    throw InvalidArgument("bounding box coordinates must be finite");
  }
  if (!(w > 0.0) || !(h > 0.0)) {
    std::ostringstream os;
    os << "bounding box needs positive extent, got w=" << w << " h=" << h;
    throw InvalidArgument(os.str());
  }
}

bool BoundingBox::contains(const BoundingBox& other) const {
  return other.x_ >= x_ && other.y_ >= y_ && other.right() <= right() &&
         other.bottom() <= bottom();
}

std::ostream& operator<<(std::ostream& os, const BoundingBox& b) {
  return os << "(" << b.x() << ", " << b.y() << ", " << b.w() << ", " << b.h()
            << ")";
}

bool lexicographic_less(const BoundingBox& a, const BoundingBox& b) {
  return std::make_tuple(a.x(), a.y(), a.w(), a.h()) <
         std::make_tuple(b.x(), b.y(), b.w(), b.h());
}

ImageSize::ImageSize(std::int64_t w, std::int64_t h) : width(w), height(h) {
  if (w < 1 || h < 1) {
    throw InvalidArgument("image dimensions must be >= 1");
  }
}

BoundingBox ImageSize::bounds() const {
  return BoundingBox(0.0, 0.0, static_cast<double>(width),
                     static_cast<double>(height));
}

Detection::Detection(BoundingBox box, double score, Frame frame)
    : box_(box), score_(score), frame_(frame) {
  if (!(score >= 0.0 && score <= 1.0)) {
    throw InvalidArgument("detection score must lie in [0, 1]");
  }
}

double intersection_area(const BoundingBox& a, const BoundingBox& b) {
  const double iw = std::min(a.right(), b.right()) - std::max(a.x(), b.x());
  const double ih = std::min(a.bottom(), b.bottom()) - std::max(a.y(), b.y());
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  return iw * ih;
}

double iou(const BoundingBox& a, const BoundingBox& b) {
  const double inter = intersection_area(a, b);
  if (inter == 0.0) return 0.0;
  // Areas from the same corner arithmetic as the intersection, so that
  // identical boxes score exactly 1.
  const double area_a = (a.right() - a.x()) * (a.bottom() - a.y());
  const double area_b = (b.right() - b.x()) * (b.bottom() - b.y());
  return inter / (area_a + area_b - inter);
}

namespace {

// x1 - x0, shrunk by ulps until x0 + extent does not round past x1.
double fitted_extent(double x0, double x1) {
  double e = x1 - x0;
  while (x0 + e > x1) e = std::nextafter(e, 0.0);
  return e;
}

}  // namespace

std::optional<BoundingBox> clip(const BoundingBox& b,
                                const BoundingBox& region) {
  const double x0 = std::max(b.x(), region.x());
  const double y0 = std::max(b.y(), region.y());
  const double x1 = std::min(b.right(), region.right());
  const double y1 = std::min(b.bottom(), region.bottom());
  if (x1 <= x0 || y1 <= y0) return std::nullopt;
  if (b.x() >= region.x() && b.y() >= region.y() && b.right() <= region.right() &&
      b.bottom() <= region.bottom()) {
    return b;
  }
  return BoundingBox(x0, y0, fitted_extent(x0, x1), fitted_extent(y0, y1));
}

BoundingBox shifted(const BoundingBox& b, PixelOffset offset) {
  return BoundingBox(b.x() + offset.dx, b.y() + offset.dy, b.w(), b.h());
}

Detection translate(const Detection& d, PixelOffset offset,
                    ImageGlobal new_frame) {
  if (!d.is_tile_local()) {
    throw FrameError("translate expects a tile-local detection");
  }
  return Detection(shifted(d.box(), offset), d.score(), new_frame);
}

Detection localize(const Detection& d, PixelOffset offset,
                   TileLocal new_frame) {
  if (!d.is_image_global()) {
    throw FrameError("localize expects an image-global detection");
  }
  return Detection(shifted(d.box(), {-offset.dx, -offset.dy}), d.score(),
                   new_frame);
}

void require_same_frame(const Detection& a, const Detection& b) {
  if (a.frame() != b.frame()) {
    throw FrameError("detections from different frames cannot be compared");
  }
}

}  // namespace orchard
