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
#ifndef ORCHARD_SEMISUP_HPP_
#define ORCHARD_SEMISUP_HPP_

// Teacher/student bookkeeping for semi-supervised detector training: pseudo
// label filtering, EMA teacher updates and the training schedules. No network
// is trained here; parameters are opaque vectors.

#include <cstdint>
#include <string>
#include <vector>

#include "orchard/geometry.hpp"

namespace orchard {

struct PseudoLabelConfig {
  double conf_threshold = 0.9;
  double nms_iou = 0.5;
  void validate() const;
};

// nms at cfg.nms_iou, then keep boxes scoring >= conf_threshold.
std::vector<BoundingBox> filter_pseudo_labels(
    const std::vector<Detection>& teacher_dets, const PseudoLabelConfig& cfg);

using ParamVector = std::vector<double>;

// decay * teacher + (1 - decay) * student, elementwise. Throws ShapeError on a
// length mismatch, InvalidArgument for decay outside [0, 1] or non-finite
// entries.
ParamVector ema_update(const ParamVector& teacher, const ParamVector& student,
                       double decay);

struct TrainSchedule {
  std::int64_t total_steps = 100000;
  double lr0 = 0.001;
  // The rate is divided by lr_drop_factor at each of these steps.
  std::vector<std::int64_t> lr_drops{60000, 80000};
  double lr_drop_factor = 10.0;
  // Labeled share of each batch.
  double ratio0 = 0.2;
  // The ratio ramps linearly to 0 over the last ratio_decay_span steps.
  std::int64_t ratio_decay_span = 5500;
  std::int64_t batch_size = 10;
  double ema_decay = 0.999;
  // Carried for completeness; nothing here consumes them.
  double momentum = 0.9;
  double weight_decay = 0.0001;

  // Throws InvalidArgument when drops are not strictly increasing and below
  // total_steps, ratio0 is outside (0, 1) or the decay span is not below
  // total_steps.
  void validate() const;
};

// lr0 / factor^(number of drops <= step). Throws RangeError outside
// [0, total_steps).
double lr_at(std::int64_t step, const TrainSchedule& sched);

// ratio0 until total - span, then linear down to exactly 0 at the final step.
double ratio_at(std::int64_t step, const TrainSchedule& sched);

struct BatchManifest {
  std::vector<std::string> labeled;
  std::vector<std::string> unlabeled;
};

// round(batch_size * ratio) labeled slots (at least 1 while ratio > 0), the
// rest unlabeled; ratio == 0 falls back to an all-labeled batch. Items are
// drawn uniformly without replacement per pool. Throws PoolExhausted when a
// pool is smaller than its slot count.
BatchManifest compose_batch(const std::vector<std::string>& labeled_pool,
                            const std::vector<std::string>& unlabeled_pool,
                            double ratio, std::int64_t batch_size,
                            std::uint64_t seed);

}  // namespace orchard

#endif  // ORCHARD_SEMISUP_HPP_
