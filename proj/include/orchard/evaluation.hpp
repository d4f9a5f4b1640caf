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
#ifndef ORCHARD_EVALUATION_HPP_
#define ORCHARD_EVALUATION_HPP_

// Single-class detection metrics in the COCO convention: IoU thresholds
// 0.50:0.05:0.95, 101-point interpolated AP, recall capped at max_dets
// detections per image, plus recall curves binned by annotation properties.

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "orchard/geometry.hpp"

namespace orchard {

struct Annotation {
  std::int64_t id = 0;
  BoundingBox box;
  std::map<std::string, double> properties;
};

struct GroundTruthSet {
  std::map<ImageId, std::vector<Annotation>> images;

  std::size_t total() const;
  // Throws PropertyError unless every annotation carries the same property
  // names with values in [0, 1].
  void validate() const;
};

using DetectionsByImage = std::map<ImageId, std::vector<Detection>>;

// The ten thresholds 0.50, 0.55, ..., 0.95.
std::vector<double> coco_iou_thresholds();

struct Matching {
  // (detection index, ground-truth index) into the inputs of match().
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  std::vector<std::size_t> unmatched_detections;
  std::vector<std::size_t> unmatched_ground_truth;
};

// Greedy matching: detections in nms_order each claim the unmatched
// ground-truth box of highest iou >= iou_threshold (lowest index on ties).
Matching match(const std::vector<Detection>& dets,
               std::span<const BoundingBox> gts, double iou_threshold);

struct PerIouResult {
  double threshold = 0.0;
  double ap = 0.0;
  double recall = 0.0;
  // Precision at the last detection of the ranked list (0 without detections).
  double final_precision = 0.0;
};

struct EvalResult {
  double ap = 0.0;
  double ar = 0.0;
  std::vector<PerIouResult> per_iou;
};

// Detections per image are truncated to the max_dets best (nms_order) before
// matching. Images absent from `dets` count as having no detections; with no
// ground truth at all both metrics are 0.
EvalResult ap_ar(const DetectionsByImage& dets, const GroundTruthSet& gts,
                 std::size_t max_dets = 100);

struct AnnotationRef {
  ImageId image = 0;
  std::size_t index = 0;
  friend bool operator==(const AnnotationRef&, const AnnotationRef&) = default;
};

struct Bin {
  double lo = 0.0;
  double hi = 0.0;
  std::vector<AnnotationRef> members;
  double ar = 0.0;
  std::size_t count() const { return members.size(); }
};

struct BinCurve {
  std::string property;
  std::vector<Bin> bins;
};

// Sorts annotations by the property (stable on image id, then annotation
// order) and chunks them into ceil(1 / bin_fraction) bins of
// floor(n / bins) annotations; the last bin takes the remainder. With fewer
// annotations than bins every bin holds one annotation. Throws PropertyError
// when an annotation lacks the property.
BinCurve property_bins(const GroundTruthSet& gts, const std::string& property,
                       double bin_fraction = 0.02);

// Fills each bin's ar: the share of its ground truth matched, averaged over
// the COCO thresholds. Matching runs per image over all ground truth, not per
// bin.
BinCurve binned_ar(const DetectionsByImage& dets, const GroundTruthSet& gts,
                   BinCurve bins, std::size_t max_dets = 100);

// sqrt(box area) / sqrt(image area).
double relative_size(const BoundingBox& box, ImageSize image);

// Mean intensity / max_value. Throws InvalidArgument for an empty region.
double brightness(std::span<const std::uint8_t> pixels, double max_value = 255.0);

}  // namespace orchard

#endif  // ORCHARD_EVALUATION_HPP_
