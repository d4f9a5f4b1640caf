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
#include "orchard/detector.hpp"

#include <algorithm>
#include <random>

#include <spdlog/spdlog.h>

#include "orchard/errors.hpp"
#include "orchard/external_detector.hpp"

namespace orchard {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t mix(std::uint64_t h, std::uint64_t v) {
  return splitmix64(h ^ splitmix64(v));
}

std::span<const BoundingBox> annotations_for(const AnnotationsByImage& all,
                                             ImageId image) {
  auto it = all.find(image);
  if (it == all.end()) return {};
  return it->second;
}

}  // namespace

std::vector<Detection> oracle_detect(std::span<const BoundingBox> annotations,
                                     const Tile& tile) {
  const BoundingBox rect = tile.rect();
  const PixelOffset to_local{-static_cast<double>(tile.x),
                             -static_cast<double>(tile.y)};
  std::vector<Detection> out;
  for (const BoundingBox& a : annotations) {
    if (auto visible = clip(a, rect)) {
      out.emplace_back(shifted(*visible, to_local), 1.0, TileLocal{tile.id});
    }
  }
  return out;
}

OracleDetector::OracleDetector(AnnotationsByImage annotations)
    : annotations_(std::move(annotations)) {}

std::vector<Detection> OracleDetector::detect(const TileTask& task) {
  return oracle_detect(annotations_for(annotations_, task.tile.image),
                       task.tile);
}

SyntheticDetector::SyntheticDetector(AnnotationsByImage annotations,
                                     std::uint64_t seed, SyntheticNoise noise)
    : annotations_(std::move(annotations)), seed_(seed), noise_(noise) {
  if (!(noise.miss_rate >= 0.0 && noise.miss_rate <= 1.0) ||
      noise.jitter_px < 0.0 || noise.false_positives_per_tile < 0.0 ||
      !(noise.score_min >= 0.0 && noise.score_min <= noise.score_max &&
        noise.score_max <= 1.0)) {
    throw InvalidArgument("invalid synthetic detector noise parameters");
  }
}

std::vector<Detection> SyntheticDetector::detect(const TileTask& task) {
  const Tile& t = task.tile;
  std::uint64_t h = mix(seed_, static_cast<std::uint64_t>(t.image));
  h = mix(h, static_cast<std::uint64_t>(t.x));
  h = mix(h, static_cast<std::uint64_t>(t.y));
  std::mt19937_64 rng(h);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> jitter(-noise_.jitter_px,
                                                noise_.jitter_px);
  std::uniform_real_distribution<double> score(noise_.score_min,
                                               noise_.score_max);

  const double tw = static_cast<double>(t.w);
  const double th = static_cast<double>(t.h);
  std::vector<Detection> out;
  for (const Detection& d : oracle_detect(
           annotations_for(annotations_, t.image), t)) {
    const double u = unit(rng);
    const double x0 = std::clamp(d.box().x() + jitter(rng), 0.0, tw);
    const double y0 = std::clamp(d.box().y() + jitter(rng), 0.0, th);
    const double x1 = std::clamp(d.box().right() + jitter(rng), 0.0, tw);
    const double y1 = std::clamp(d.box().bottom() + jitter(rng), 0.0, th);
    const double s = score(rng);
    if (u < noise_.miss_rate || x1 - x0 < 1.0 || y1 - y0 < 1.0) continue;
    out.emplace_back(BoundingBox(x0, y0, x1 - x0, y1 - y0), s,
                     TileLocal{t.id});
  }
  std::poisson_distribution<int> spurious(noise_.false_positives_per_tile);
  const int n = noise_.false_positives_per_tile > 0.0 ? spurious(rng) : 0;
  for (int i = 0; i < n; ++i) {
    const double side = 10.0 + 70.0 * unit(rng);
    const double w = std::min(side, tw);
    const double hgt = std::min(side, th);
    const double x = (tw - w) * unit(rng);
    const double y = (th - hgt) * unit(rng);
    out.emplace_back(BoundingBox(x, y, w, hgt), noise_.score_min * unit(rng),
                     TileLocal{t.id});
  }
  return out;
}

namespace {

struct DetectorFactory {
  std::unique_ptr<Detector> operator()(OracleSpec& s) const {
    return std::make_unique<OracleDetector>(std::move(s.annotations));
  }
  std::unique_ptr<Detector> operator()(SyntheticSpec& s) const {
    return std::make_unique<SyntheticDetector>(std::move(s.annotations), s.seed,
                                               s.noise);
  }
  std::unique_ptr<Detector> operator()(ExternalSpec& s) const {
    if (s.timeout.count() <= 0) {
      throw InvalidArgument("external detector timeout must be positive");
    }
    if (s.argv.empty()) throw InvalidArgument("external detector needs argv");
    return std::make_unique<ExternalDetector>(std::move(s));
  }
};

}  // namespace

std::unique_ptr<Detector> make_detector(DetectorHandle handle) {
  return std::visit(DetectorFactory{}, handle);
}

std::vector<Detection> detect_tile(Detector& detector, const TileTask& task) {
  const Tile& t = task.tile;
  const BoundingBox local(0.0, 0.0, static_cast<double>(t.w),
                          static_cast<double>(t.h));
  std::vector<Detection> out;
  for (const Detection& d : detector.detect(task)) {
    if (!d.is_tile_local()) {
      throw FrameError("detector returned a non tile-local detection for " +
                       task.request_id);
    }
    if (local.contains(d.box())) {
      out.emplace_back(d.box(), d.score(), TileLocal{t.id});
      continue;
    }
    auto clipped = clip(d.box(), local);
    if (!clipped) {
      spdlog::warn("request {}: dropped detection outside the tile",
                   task.request_id);
      continue;
    }
    spdlog::info("request {}: clipped detection to the tile", task.request_id);
    out.emplace_back(*clipped, d.score(), TileLocal{t.id});
  }
  return out;
}

}  // namespace orchard
