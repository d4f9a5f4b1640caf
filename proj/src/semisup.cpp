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
#include "orchard/semisup.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "orchard/errors.hpp"
#include "orchard/reconstruction.hpp"

namespace orchard {

void PseudoLabelConfig::validate() const {
  if (!(conf_threshold > 0.0 && conf_threshold < 1.0) ||
      !(nms_iou > 0.0 && nms_iou < 1.0)) {
    throw InvalidArgument("pseudo-label thresholds must lie in (0, 1)");
  }
}

std::vector<BoundingBox> filter_pseudo_labels(
    const std::vector<Detection>& teacher_dets, const PseudoLabelConfig& cfg) {
  cfg.validate();
  std::vector<BoundingBox> out;
  for (const Detection& d : nms(teacher_dets, cfg.nms_iou)) {
    if (d.score() >= cfg.conf_threshold) out.push_back(d.box());
  }
  return out;
}

ParamVector ema_update(const ParamVector& teacher, const ParamVector& student,
                       double decay) {
  if (teacher.size() != student.size()) {
    throw ShapeError("teacher has " + std::to_string(teacher.size()) +
                     " parameters, student " + std::to_string(student.size()));
  }
  if (!(decay >= 0.0 && decay <= 1.0)) {
    throw InvalidArgument("ema decay must lie in [0, 1]");
  }
  ParamVector out(teacher.size());
  for (std::size_t i = 0; i < teacher.size(); ++i) {
    if (!std::isfinite(teacher[i]) || !std::isfinite(student[i])) {
      throw InvalidArgument("parameter vectors must be finite");
    }
    out[i] = decay * teacher[i] + (1.0 - decay) * student[i];
  }
  return out;
}

void TrainSchedule::validate() const {
  if (total_steps <= 0) throw InvalidArgument("total_steps must be positive");
  for (std::size_t i = 0; i < lr_drops.size(); ++i) {
    if (lr_drops[i] < 0 || lr_drops[i] >= total_steps ||
        (i > 0 && lr_drops[i] <= lr_drops[i - 1])) {
      throw InvalidArgument(
          "lr drops must be strictly increasing and below total_steps");
    }
  }
  if (!(lr0 > 0.0) || !(lr_drop_factor > 0.0)) {
    throw InvalidArgument("learning rate and drop factor must be positive");
  }
  if (!(ratio0 > 0.0 && ratio0 < 1.0)) {
    throw InvalidArgument("ratio0 must lie in (0, 1)");
  }
  if (ratio_decay_span < 1 || ratio_decay_span >= total_steps) {
    throw InvalidArgument("ratio decay span must lie in [1, total_steps)");
  }
  if (batch_size < 1) throw InvalidArgument("batch_size must be positive");
  if (!(ema_decay >= 0.0 && ema_decay <= 1.0)) {
    throw InvalidArgument("ema_decay must lie in [0, 1]");
  }
}

namespace {

void check_step(std::int64_t step, const TrainSchedule& sched) {
  if (step < 0 || step >= sched.total_steps) {
    throw RangeError("step " + std::to_string(step) + " outside [0, " +
                     std::to_string(sched.total_steps) + ")");
  }
}

}  // namespace

double lr_at(std::int64_t step, const TrainSchedule& sched) {
  check_step(step, sched);
  double lr = sched.lr0;
  for (std::int64_t drop : sched.lr_drops) {
    if (drop <= step) lr /= sched.lr_drop_factor;
  }
  return lr;
}

double ratio_at(std::int64_t step, const TrainSchedule& sched) {
  check_step(step, sched);
  const std::int64_t start = sched.total_steps - sched.ratio_decay_span;
  if (step < start) return sched.ratio0;
  const std::int64_t last = sched.total_steps - 1;
  if (last == start) return 0.0;
  return sched.ratio0 * (static_cast<double>(last - step) /
                         static_cast<double>(last - start));
}

namespace {

// Partial Fisher-Yates: the first k entries of a uniformly shuffled copy.
std::vector<std::string> draw(const std::vector<std::string>& pool,
                              std::size_t k, std::mt19937_64& rng) {
  std::vector<std::size_t> idx(pool.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::vector<std::string> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, idx.size() - 1);
    std::swap(idx[i], idx[pick(rng)]);
    out.push_back(pool[idx[i]]);
  }
  return out;
}

}  // namespace

BatchManifest compose_batch(const std::vector<std::string>& labeled_pool,
                            const std::vector<std::string>& unlabeled_pool,
                            double ratio, std::int64_t batch_size,
                            std::uint64_t seed) {
  if (batch_size < 1) throw InvalidArgument("batch_size must be positive");
  if (!(ratio >= 0.0 && ratio <= 1.0)) {
    throw InvalidArgument("sampling ratio must lie in [0, 1]");
  }
  std::int64_t labeled = batch_size;
  if (ratio > 0.0) {
    labeled = std::max<std::int64_t>(
        1, static_cast<std::int64_t>(std::llround(static_cast<double>(batch_size) * ratio)));
  }
  const std::int64_t unlabeled = batch_size - labeled;
  if (static_cast<std::int64_t>(labeled_pool.size()) < labeled) {
    throw PoolExhausted("labeled pool has " +
                        std::to_string(labeled_pool.size()) + " items, needs " +
                        std::to_string(labeled));
  }
  if (static_cast<std::int64_t>(unlabeled_pool.size()) < unlabeled) {
    throw PoolExhausted("unlabeled pool has " +
                        std::to_string(unlabeled_pool.size()) +
                        " items, needs " + std::to_string(unlabeled));
  }
  std::mt19937_64 rng(seed);
  BatchManifest batch;
  batch.labeled = draw(labeled_pool, static_cast<std::size_t>(labeled), rng);
  batch.unlabeled =
      draw(unlabeled_pool, static_cast<std::size_t>(unlabeled), rng);
  return batch;
}

}  // namespace orchard
