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
#ifndef ORCHARD_GEOMETRY_HPP_
#define ORCHARD_GEOMETRY_HPP_

#include <cstdint>
#include <optional>
#include <ostream>
#include <variant>

namespace orchard {

using ImageId = std::int64_t;
using TileId = std::int64_t;

// Axis-aligned rectangle in pixel units. Origin is the image top-left corner,
// y grows downward. Area is w * h (continuous, no +1 pixel convention).
class BoundingBox {
 public:
  // Throws InvalidArgument unless w > 0, h > 0 and all values are finite.
  BoundingBox(double x, double y, double w, double h);

  double x() const { return x_; }
  double y() const { return y_; }
  double w() const { return w_; }
  double h() const { return h_; }
  double right() const { return x_ + w_; }
  double bottom() const { return y_ + h_; }
  double area() const { return w_ * h_; }

  // True when `other` lies inside this box (closed containment).
  bool contains(const BoundingBox& other) const;

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;

 private:
  double x_;
  double y_;
  double w_;
  double h_;
};

std::ostream& operator<<(std::ostream& os, const BoundingBox& b);

// Strict weak order on (x, y, w, h); used for deterministic tie-breaking.
bool lexicographic_less(const BoundingBox& a, const BoundingBox& b);

struct ImageSize {
  // Throws InvalidArgument unless both dimensions are >= 1.
  ImageSize(std::int64_t width, std::int64_t height);

  std::int64_t width;
  std::int64_t height;

  std::int64_t pixel_count() const { return width * height; }
  BoundingBox bounds() const;

  friend bool operator==(const ImageSize&, const ImageSize&) = default;
};

struct TileLocal {
  TileId tile;
  friend bool operator==(const TileLocal&, const TileLocal&) = default;
};

struct ImageGlobal {
  ImageId image;
  friend bool operator==(const ImageGlobal&, const ImageGlobal&) = default;
};

using Frame = std::variant<TileLocal, ImageGlobal>;

class Detection {
 public:
  // Throws InvalidArgument unless 0 <= score <= 1.
  Detection(BoundingBox box, double score, Frame frame);

  const BoundingBox& box() const { return box_; }
  double score() const { return score_; }
  const Frame& frame() const { return frame_; }

  bool is_tile_local() const {
    return std::holds_alternative<TileLocal>(frame_);
  }
  bool is_image_global() const {
    return std::holds_alternative<ImageGlobal>(frame_);
  }

  friend bool operator==(const Detection&, const Detection&) = default;

 private:
  BoundingBox box_;
  double score_;
  Frame frame_;
};

struct PixelOffset {
  double dx = 0.0;
  double dy = 0.0;
};

// Intersection over union. 0 for disjoint boxes.
double iou(const BoundingBox& a, const BoundingBox& b);

// Area of the intersection, 0 for disjoint boxes.
double intersection_area(const BoundingBox& a, const BoundingBox& b);

// Geometric intersection. Empty when the boxes are disjoint or only touch
// along an edge or corner.
std::optional<BoundingBox> clip(const BoundingBox& b,
                                const BoundingBox& region);

BoundingBox shifted(const BoundingBox& b, PixelOffset offset);

// Maps a tile-local detection into the image frame. Throws FrameError for a
// detection that is already ImageGlobal.
Detection translate(const Detection& d, PixelOffset offset,
                    ImageGlobal new_frame);

// Inverse of translate: maps an image-global detection into a tile frame by
// subtracting `offset`. Throws FrameError for TileLocal input.
Detection localize(const Detection& d, PixelOffset offset, TileLocal new_frame);

// Throws FrameError unless both detections are in the same frame.
void require_same_frame(const Detection& a, const Detection& b);

}  // namespace orchard

#endif  // ORCHARD_GEOMETRY_HPP_
