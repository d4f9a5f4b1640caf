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
#ifndef ORCHARD_SYNTH_HPP_
#define ORCHARD_SYNTH_HPP_

// Procedural orchard scenes: bright disc "apples" inside an elliptical crown
// on a textured background. Output is a function of the config alone.

#include <cstdint>
#include <filesystem>
#include <vector>

#include "orchard/dataset.hpp"
#include "orchard/geometry.hpp"
#include "orchard/pgm.hpp"

namespace orchard {

struct Ellipse {
  double cx = 0.0;
  double cy = 0.0;
  double rx = 0.0;
  double ry = 0.0;
  bool contains(double x, double y) const;
};

struct SceneConfig {
  std::uint64_t seed = 0;
  std::int64_t width = 3840;
  std::int64_t height = 2160;
  std::int64_t apple_count = 50;
  // Inclusive range of apple diameters (box sides) in pixels.
  std::int64_t min_size = 20;
  std::int64_t max_size = 200;
  // Unset (rx == 0) means centered with semi-axes at 40% of the image.
  Ellipse crown;
  // Placements overlapping an existing apple with iou above this are redrawn.
  double max_pair_iou = 0.3;
  int retries_per_apple = 2000;

  // Throws InvalidArgument on invalid ranges or a crown leaving the image.
  void validate() const;
  Ellipse effective_crown() const;
};

struct SceneApple {
  BoundingBox box;
  double relative_size = 0.0;
  double brightness = 0.0;
  // Fraction of the box covered by the union of the other apples' boxes.
  double occlusion = 0.0;
};

struct Scene {
  GrayImage image;
  std::vector<SceneApple> apples;
};

// Throws PackingError when an apple cannot be placed after the retry budget.
Scene synth_scene(const SceneConfig& cfg);

// Renders `count` scenes (seed + i, image ids first_id + i) into `dir` as
// scene_<id>.pgm plus manifest.json, all in `split`. Returns the index.
DatasetIndex synth_dataset(const SceneConfig& cfg, int count,
                           const std::filesystem::path& dir,
                           Split split = Split::kTest, ImageId first_id = 1);

}  // namespace orchard

#endif  // ORCHARD_SYNTH_HPP_
