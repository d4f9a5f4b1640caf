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
#include "orchard/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "orchard/errors.hpp"
#include "orchard/reconstruction.hpp"

namespace orchard {

namespace {

constexpr int kRecallPoints = 101;

// Ranked, truncated detections of one image.
std::vector<Detection> top_detections(const std::vector<Detection>& dets,
                                      std::size_t max_dets) {
  std::vector<Detection> ranked = dets;
  std::stable_sort(ranked.begin(), ranked.end(), nms_order);
  if (ranked.size() > max_dets) ranked.erase(ranked.begin() + static_cast<std::ptrdiff_t>(max_dets), ranked.end());
  return ranked;
}

std::vector<BoundingBox> boxes_of(const std::vector<Annotation>& anns) {
  std::vector<BoundingBox> out;
  out.reserve(anns.size());
  for (const Annotation& a : anns) out.push_back(a.box);
  return out;
}

// Per image: ranked detections and their ground-truth boxes.
struct PreparedImage {
  ImageId id;
  std::vector<Detection> dets;
  std::vector<BoundingBox> gts;
};

std::vector<PreparedImage> prepare(const DetectionsByImage& dets,
                                   const GroundTruthSet& gts,
                                   std::size_t max_dets) {
  std::map<ImageId, PreparedImage> by_id;
  for (const auto& [id, anns] : gts.images) {
    by_id.emplace(id, PreparedImage{id, {}, boxes_of(anns)});
  }
  for (const auto& [id, list] : dets) {
    auto [it, inserted] = by_id.emplace(id, PreparedImage{id, {}, {}});
    it->second.dets = top_detections(list, max_dets);
  }
  std::vector<PreparedImage> out;
  for (auto& [id, img] : by_id) out.push_back(std::move(img));
  return out;
}

}  // namespace

std::size_t GroundTruthSet::total() const {
  std::size_t n = 0;
  for (const auto& [id, anns] : images) n += anns.size();
  return n;
}

void GroundTruthSet::validate() const {
  const std::map<std::string, double>* reference = nullptr;
  for (const auto& [id, anns] : images) {
    for (const Annotation& a : anns) {
      for (const auto& [name, value] : a.properties) {
        if (!(value >= 0.0 && value <= 1.0)) {
          throw PropertyError("property '" + name + "' outside [0, 1]");
        }
      }
      if (!reference) {
        reference = &a.properties;
        continue;
      }
      const bool same = std::equal(
          reference->begin(), reference->end(), a.properties.begin(),
          a.properties.end(),
          [](const auto& l, const auto& r) { return l.first == r.first; });
      if (!same) {
        throw PropertyError("annotations carry inconsistent property names");
      }
    }
  }
}

std::vector<double> coco_iou_thresholds() {
  std::vector<double> t;
  for (int i = 0; i < 10; ++i) t.push_back((50.0 + 5.0 * i) / 100.0);
  return t;
}

Matching match(const std::vector<Detection>& dets,
               std::span<const BoundingBox> gts, double iou_threshold) {
  std::vector<std::size_t> order(dets.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return nms_order(dets[a], dets[b]);
  });
  std::vector<char> taken(gts.size(), 0);
  Matching m;
  for (std::size_t d : order) {
    double best = iou_threshold;
    std::ptrdiff_t best_gt = -1;
    for (std::size_t g = 0; g < gts.size(); ++g) {
      if (taken[g]) continue;
      const double v = iou(dets[d].box(), gts[g]);
      if (v >= best && (best_gt < 0 || v > best)) {
        best = v;
        best_gt = static_cast<std::ptrdiff_t>(g);
      }
    }
    if (best_gt >= 0) {
      taken[static_cast<std::size_t>(best_gt)] = 1;
      m.pairs.emplace_back(d, static_cast<std::size_t>(best_gt));
    } else {
      m.unmatched_detections.push_back(d);
    }
  }
  for (std::size_t g = 0; g < gts.size(); ++g) {
    if (!taken[g]) m.unmatched_ground_truth.push_back(g);
  }
  return m;
}

EvalResult ap_ar(const DetectionsByImage& dets, const GroundTruthSet& gts,
                 std::size_t max_dets) {
  const std::vector<PreparedImage> images = prepare(dets, gts, max_dets);
  std::size_t num_gt = 0;
  for (const PreparedImage& img : images) num_gt += img.gts.size();

  // Global ranking: score descending; ties keep image order, then rank order.
  struct Ranked {
    double score;
    std::size_t image;
    std::size_t rank;
  };
  std::vector<Ranked> ranking;
  for (std::size_t i = 0; i < images.size(); ++i) {
    for (std::size_t r = 0; r < images[i].dets.size(); ++r) {
      ranking.push_back({images[i].dets[r].score(), i, r});
    }
  }
  std::stable_sort(ranking.begin(), ranking.end(),
                   [](const Ranked& a, const Ranked& b) { return a.score > b.score; });

  EvalResult result;
  for (double thr : coco_iou_thresholds()) {
    PerIouResult per{thr, 0.0, 0.0, 0.0};
    std::vector<std::vector<char>> is_tp(images.size());
    for (std::size_t i = 0; i < images.size(); ++i) {
      is_tp[i].assign(images[i].dets.size(), 0);
      // dets are already in nms_order, so match() indices are ranks.
      for (const auto& [d, g] : match(images[i].dets, images[i].gts, thr).pairs) {
        is_tp[i][d] = 1;
      }
    }
    if (num_gt > 0 && !ranking.empty()) {
      std::vector<double> precision(ranking.size());
      std::vector<double> recall(ranking.size());
      std::size_t tp = 0;
      for (std::size_t k = 0; k < ranking.size(); ++k) {
        tp += is_tp[ranking[k].image][ranking[k].rank];
        precision[k] = static_cast<double>(tp) / static_cast<double>(k + 1);
        recall[k] = static_cast<double>(tp) / static_cast<double>(num_gt);
      }
      per.recall = recall.back();
      per.final_precision = precision.back();
      // Precision envelope, then sampled at 101 recall levels.
      for (std::size_t k = precision.size() - 1; k > 0; --k) {
        precision[k - 1] = std::max(precision[k - 1], precision[k]);
      }
      double sum = 0.0;
      for (int r = 0; r < kRecallPoints; ++r) {
        const double level = static_cast<double>(r) / 100.0;
        auto it = std::lower_bound(recall.begin(), recall.end(), level);
        if (it != recall.end()) sum += precision[static_cast<std::size_t>(it - recall.begin())];
      }
      per.ap = sum / kRecallPoints;
    }
    result.per_iou.push_back(per);
  }
  double ap_sum = 0.0;
  double ar_sum = 0.0;
  for (const PerIouResult& p : result.per_iou) {
    ap_sum += p.ap;
    ar_sum += p.recall;
  }
  result.ap = ap_sum / static_cast<double>(result.per_iou.size());
  result.ar = ar_sum / static_cast<double>(result.per_iou.size());
  return result;
}

BinCurve property_bins(const GroundTruthSet& gts, const std::string& property,
                       double bin_fraction) {
  if (!(bin_fraction > 0.0 && bin_fraction <= 1.0)) {
    throw InvalidArgument("bin fraction must lie in (0, 1]");
  }
  struct Keyed {
    double value;
    AnnotationRef ref;
  };
  std::vector<Keyed> all;
  for (const auto& [id, anns] : gts.images) {
    for (std::size_t i = 0; i < anns.size(); ++i) {
      auto it = anns[i].properties.find(property);
      if (it == anns[i].properties.end()) {
        throw PropertyError("annotation " + std::to_string(anns[i].id) +
                            " of image " + std::to_string(id) +
                            " lacks property '" + property + "'");
      }
      all.push_back({it->second, {id, i}});
    }
  }
  std::stable_sort(all.begin(), all.end(),
                   [](const Keyed& a, const Keyed& b) { return a.value < b.value; });

  BinCurve curve;
  curve.property = property;
  const std::size_t n = all.size();
  if (n == 0) return curve;
  std::size_t num_bins =
      static_cast<std::size_t>(std::ceil(1.0 / bin_fraction - 1e-9));
  num_bins = std::min(num_bins, n);
  const std::size_t per_bin = n / num_bins;
  for (std::size_t b = 0; b < num_bins; ++b) {
    const std::size_t begin = b * per_bin;
    const std::size_t end = b + 1 == num_bins ? n : begin + per_bin;
    Bin bin;
    bin.lo = all[begin].value;
    bin.hi = all[end - 1].value;
    for (std::size_t k = begin; k < end; ++k) bin.members.push_back(all[k].ref);
    curve.bins.push_back(std::move(bin));
  }
  return curve;
}

BinCurve binned_ar(const DetectionsByImage& dets, const GroundTruthSet& gts,
                   BinCurve bins, std::size_t max_dets) {
  const std::vector<PreparedImage> images = prepare(dets, gts, max_dets);
  const std::vector<double> thresholds = coco_iou_thresholds();

  // matched[thr][image] -> per-annotation flag
  std::vector<std::map<ImageId, std::vector<char>>> matched(thresholds.size());
  for (std::size_t t = 0; t < thresholds.size(); ++t) {
    for (const PreparedImage& img : images) {
      std::vector<char> flags(img.gts.size(), 0);
      for (const auto& [d, g] : match(img.dets, img.gts, thresholds[t]).pairs) {
        flags[g] = 1;
      }
      matched[t].emplace(img.id, std::move(flags));
    }
  }
  for (Bin& bin : bins.bins) {
    double sum = 0.0;
    for (std::size_t t = 0; t < thresholds.size(); ++t) {
      std::size_t hits = 0;
      for (const AnnotationRef& ref : bin.members) {
        auto it = matched[t].find(ref.image);
        if (it == matched[t].end() || ref.index >= it->second.size()) {
          throw InvalidArgument("bin member not present in the ground truth");
        }
        hits += it->second[ref.index];
      }
      sum += bin.members.empty()
                 ? 0.0
                 : static_cast<double>(hits) / static_cast<double>(bin.members.size());
    }
    bin.ar = sum / static_cast<double>(thresholds.size());
  }
  return bins;
}

double relative_size(const BoundingBox& box, ImageSize image) {
  return std::sqrt(box.area()) / std::sqrt(static_cast<double>(image.pixel_count()));
}

double brightness(std::span<const std::uint8_t> pixels, double max_value) {
  if (pixels.empty()) throw InvalidArgument("brightness of an empty region");
  if (!(max_value > 0.0)) throw InvalidArgument("max_value must be positive");
  const double sum = std::accumulate(pixels.begin(), pixels.end(), 0.0);
  return sum / static_cast<double>(pixels.size()) / max_value;
}

}  // namespace orchard
