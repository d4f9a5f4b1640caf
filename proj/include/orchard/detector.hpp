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
#ifndef ORCHARD_DETECTOR_HPP_
#define ORCHARD_DETECTOR_HPP_

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "orchard/geometry.hpp"
#include "orchard/tiling.hpp"

namespace orchard {

// One unit of work for a detector. Pixels are not shipped; the detector reads
// the tile rectangle from `image_path` itself.
struct TileTask {
  std::string request_id;
  Tile tile;
  std::filesystem::path image_path;
};

// Per-tile detector. Implementations must be safe to call concurrently for
// distinct tasks and return TileLocal detections.
class Detector {
 public:
  virtual ~Detector() = default;
  virtual std::vector<Detection> detect(const TileTask& task) = 0;
};

using AnnotationsByImage = std::map<ImageId, std::vector<BoundingBox>>;

// Every annotation that intersects the tile, clipped to it, in tile-local
// coordinates with score 1.
std::vector<Detection> oracle_detect(std::span<const BoundingBox> annotations,
                                     const Tile& tile);

class OracleDetector : public Detector {
 public:
  explicit OracleDetector(AnnotationsByImage annotations);
  std::vector<Detection> detect(const TileTask& task) override;

 private:
  AnnotationsByImage annotations_;
};

struct SyntheticNoise {
  // Uniform corner jitter in pixels.
  double jitter_px = 2.0;
  // Probability of dropping a true object.
  double miss_rate = 0.05;
  // Expected number of spurious boxes per tile.
  double false_positives_per_tile = 0.5;
  // Score range of true detections; spurious ones score below score_min.
  double score_min = 0.5;
  double score_max = 1.0;
};

// Oracle output perturbed deterministically: the random stream depends only on
// (seed, image, tile origin), so results do not depend on call order.
class SyntheticDetector : public Detector {
 public:
  SyntheticDetector(AnnotationsByImage annotations, std::uint64_t seed,
                    SyntheticNoise noise = {});
  std::vector<Detection> detect(const TileTask& task) override;

 private:
  AnnotationsByImage annotations_;
  std::uint64_t seed_;
  SyntheticNoise noise_;
};

struct OracleSpec {
  AnnotationsByImage annotations;
};

struct SyntheticSpec {
  AnnotationsByImage annotations;
  std::uint64_t seed = 0;
  SyntheticNoise noise;
};

struct ExternalSpec {
  // argv of the child process; argv[0] is looked up on PATH.
  std::vector<std::string> argv;
  std::chrono::milliseconds timeout{30000};
};

using DetectorHandle = std::variant<OracleSpec, SyntheticSpec, ExternalSpec>;

// Throws InvalidArgument for a non-positive external timeout.
std::unique_ptr<Detector> make_detector(DetectorHandle handle);

// Runs the detector and enforces the gateway contract: TileLocal frame,
// boxes clipped to the tile (clipping is logged, boxes fully outside are
// dropped), scores in [0, 1].
std::vector<Detection> detect_tile(Detector& detector, const TileTask& task);

}  // namespace orchard

#endif  // ORCHARD_DETECTOR_HPP_
