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
#include "orchard/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "orchard/errors.hpp"
#include "orchard/evaluation.hpp"

namespace orchard {

namespace {

// The standard distributions are implementation-defined, so draws are mapped
// by hand to keep scenes identical across standard libraries.
double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::int64_t uniform_int(std::mt19937_64& rng, std::int64_t lo, std::int64_t hi) {
  const auto span = static_cast<double>(hi - lo + 1);
  return std::min(hi, lo + static_cast<std::int64_t>(uniform01(rng) * span));
}

std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

int hash_noise(std::uint64_t seed, std::int64_t x, std::int64_t y, int range) {
  const std::uint64_t h =
      mix(seed ^ mix(static_cast<std::uint64_t>(x) * 0x100000001b3ULL +
                     static_cast<std::uint64_t>(y)));
  return static_cast<int>(h % static_cast<std::uint64_t>(range)) - range / 2;
}

std::uint8_t to_byte(int v) {
  return static_cast<std::uint8_t>(std::clamp(v, 0, 255));
}

void render_background(GrayImage& img, const Ellipse& crown, std::uint64_t seed) {
  for (std::int64_t y = 0; y < img.height; ++y) {
    for (std::int64_t x = 0; x < img.width; ++x) {
      const double px = static_cast<double>(x) + 0.5;
      const double py = static_cast<double>(y) + 0.5;
      int v;
      if (crown.contains(px, py)) {
        // Foliage: coarse leaf blotches plus fine grain.
        v = 90 + hash_noise(seed + 1, x / 6, y / 6, 41) + hash_noise(seed + 2, x, y, 9);
      } else {
        v = 45 + hash_noise(seed + 3, x / 4, y / 4, 21) + hash_noise(seed + 4, x, y, 7);
      }
      img.pixels[static_cast<std::size_t>(y * img.width + x)] = to_byte(v);
    }
  }
}

void render_apple(GrayImage& img, const BoundingBox& box, int level) {
  const double r = box.w() / 2.0;
  const double cx = box.x() + r;
  const double cy = box.y() + r;
  const auto x0 = static_cast<std::int64_t>(box.x());
  const auto y0 = static_cast<std::int64_t>(box.y());
  const auto x1 = static_cast<std::int64_t>(box.right());
  const auto y1 = static_cast<std::int64_t>(box.bottom());
  for (std::int64_t y = y0; y < y1; ++y) {
    for (std::int64_t x = x0; x < x1; ++x) {
      const double dx = static_cast<double>(x) + 0.5 - cx;
      const double dy = static_cast<double>(y) + 0.5 - cy;
      const double d = std::sqrt(dx * dx + dy * dy);
      if (d > r) continue;
      const int shade = static_cast<int>(std::lround(30.0 * d / r));
      img.pixels[static_cast<std::size_t>(y * img.width + x)] = to_byte(level - shade);
    }
  }
}

bool box_in_ellipse(const Ellipse& e, const BoundingBox& b) {
  return e.contains(b.x(), b.y()) && e.contains(b.right(), b.y()) &&
         e.contains(b.x(), b.bottom()) && e.contains(b.right(), b.bottom());
}

double occlusion_of(std::size_t i, const std::vector<SceneApple>& apples) {
  const BoundingBox& b = apples[i].box;
  const auto w = static_cast<std::int64_t>(b.w());
  const auto h = static_cast<std::int64_t>(b.h());
  std::vector<std::uint8_t> covered(static_cast<std::size_t>(w * h), 0);
  bool any = false;
  for (std::size_t j = 0; j < apples.size(); ++j) {
    if (j == i) continue;
    const BoundingBox& o = apples[j].box;
    const auto x0 = static_cast<std::int64_t>(std::max(b.x(), o.x()) - b.x());
    const auto y0 = static_cast<std::int64_t>(std::max(b.y(), o.y()) - b.y());
    const auto x1 = static_cast<std::int64_t>(std::min(b.right(), o.right()) - b.x());
    const auto y1 = static_cast<std::int64_t>(std::min(b.bottom(), o.bottom()) - b.y());
    if (x1 <= x0 || y1 <= y0) continue;
    any = true;
    for (std::int64_t y = y0; y < y1; ++y) {
      std::fill_n(covered.begin() + y * w + x0, x1 - x0, std::uint8_t{1});
    }
  }
  if (!any) return 0.0;
  const auto n = std::count(covered.begin(), covered.end(), std::uint8_t{1});
  return static_cast<double>(n) / static_cast<double>(w * h);
}

}  // namespace

bool Ellipse::contains(double x, double y) const {
  const double u = (x - cx) / rx;
  const double v = (y - cy) / ry;
  return u * u + v * v <= 1.0;
}

void SceneConfig::validate() const {
  if (width < 1 || height < 1) throw InvalidArgument("image size must be positive");
  if (apple_count < 0) throw InvalidArgument("apple count must be non-negative");
  if (min_size < 2 || max_size < min_size) {
    throw InvalidArgument("apple sizes need 2 <= min <= max");
  }
  if (!(max_pair_iou >= 0.0 && max_pair_iou < 1.0)) {
    throw InvalidArgument("max_pair_iou must lie in [0, 1)");
  }
  if (retries_per_apple < 1) throw InvalidArgument("retries must be positive");
  const Ellipse e = effective_crown();
  if (!(e.rx > 0.0 && e.ry > 0.0) || e.cx - e.rx < 0.0 || e.cy - e.ry < 0.0 ||
      e.cx + e.rx > static_cast<double>(width) ||
      e.cy + e.ry > static_cast<double>(height)) {
    throw InvalidArgument("crown ellipse must lie inside the image");
  }
}

Ellipse SceneConfig::effective_crown() const {
  if (crown.rx > 0.0) return crown;
  const double w = static_cast<double>(width);
  const double h = static_cast<double>(height);
  return {w / 2.0, h / 2.0, 0.4 * w, 0.4 * h};
}

Scene synth_scene(const SceneConfig& cfg) {
  cfg.validate();
  const Ellipse crown = cfg.effective_crown();
  std::mt19937_64 rng(mix(cfg.seed));

  Scene scene;
  scene.image.width = cfg.width;
  scene.image.height = cfg.height;
  scene.image.pixels.assign(static_cast<std::size_t>(cfg.width * cfg.height), 0);

  std::vector<int> levels;
  const auto lo_x = static_cast<std::int64_t>(std::ceil(crown.cx - crown.rx));
  const auto lo_y = static_cast<std::int64_t>(std::ceil(crown.cy - crown.ry));
  const auto hi_x = static_cast<std::int64_t>(std::floor(crown.cx + crown.rx));
  const auto hi_y = static_cast<std::int64_t>(std::floor(crown.cy + crown.ry));
  for (std::int64_t k = 0; k < cfg.apple_count; ++k) {
    bool placed = false;
    for (int attempt = 0; attempt < cfg.retries_per_apple && !placed; ++attempt) {
      const std::int64_t s = uniform_int(rng, cfg.min_size, cfg.max_size);
      if (hi_x - s < lo_x || hi_y - s < lo_y) continue;
      const std::int64_t x = uniform_int(rng, lo_x, hi_x - s);
      const std::int64_t y = uniform_int(rng, lo_y, hi_y - s);
      const BoundingBox box(static_cast<double>(x), static_cast<double>(y),
                            static_cast<double>(s), static_cast<double>(s));
      if (!box_in_ellipse(crown, box)) continue;
      const bool clash = std::any_of(
          scene.apples.begin(), scene.apples.end(),
          [&](const SceneApple& a) { return iou(a.box, box) > cfg.max_pair_iou; });
      if (clash) continue;
      scene.apples.push_back(SceneApple{box, 0.0, 0.0, 0.0});
      levels.push_back(static_cast<int>(uniform_int(rng, 150, 240)));
      placed = true;
    }
    if (!placed) {
      throw PackingError("could not place apple " + std::to_string(k + 1) + " of " +
                         std::to_string(cfg.apple_count) + " after " +
                         std::to_string(cfg.retries_per_apple) + " attempts");
    }
  }

  render_background(scene.image, crown, mix(cfg.seed + 0x5eed));
  for (std::size_t i = 0; i < scene.apples.size(); ++i) {
    render_apple(scene.image, scene.apples[i].box, levels[i]);
  }
  const ImageSize size(cfg.width, cfg.height);
  for (std::size_t i = 0; i < scene.apples.size(); ++i) {
    SceneApple& a = scene.apples[i];
    a.relative_size = relative_size(a.box, size);
    a.brightness = brightness(crop(scene.image, a.box));
    a.occlusion = occlusion_of(i, scene.apples);
  }
  return scene;
}

DatasetIndex synth_dataset(const SceneConfig& cfg, int count,
                           const std::filesystem::path& dir, Split split,
                           ImageId first_id) {
  if (count < 0) throw InvalidArgument("scene count must be non-negative");
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());

  std::vector<ImageRecord> images;
  std::vector<AnnotationRecord> annotations;
  std::int64_t next_ann = 1;
  for (int i = 0; i < count; ++i) {
    SceneConfig c = cfg;
    c.seed = cfg.seed + static_cast<std::uint64_t>(i);
    const Scene scene = synth_scene(c);
    const ImageId id = first_id + i;
    const std::string file = "scene_" + std::to_string(id) + ".pgm";
    write_pgm(dir / file, scene.image);
    images.push_back(ImageRecord{id, file, cfg.width, cfg.height, split});
    for (const SceneApple& a : scene.apples) {
      annotations.push_back(AnnotationRecord{next_ann++,
                                             id,
                                             a.box,
                                             {{"relative_size", a.relative_size},
                                              {"brightness", a.brightness},
                                              {"occlusion", a.occlusion}}});
    }
  }
  DatasetIndex index(std::move(images), std::move(annotations), dir);
  save_dataset(index, dir / "manifest.json");
  return index;
}

}  // namespace orchard
