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
#include <algorithm>
#include <random>
#include <vector>

#include "doctest.h"
#include "oracles/reference.hpp"
#include "orchard/errors.hpp"
#include "orchard/evaluation.hpp"

using namespace orchard;

namespace {

Detection det(const BoundingBox& b, double s, ImageId img = 1) {
  return Detection(b, s, ImageGlobal{img});
}

GroundTruthSet gt_of(const std::map<ImageId, std::vector<BoundingBox>>& boxes) {
  GroundTruthSet g;
  std::int64_t id = 1;
  for (const auto& [img, list] : boxes) {
    auto& anns = g.images[img];
    for (const BoundingBox& b : list) anns.push_back(Annotation{id++, b, {}});
  }
  return g;
}

// Ground truth whose i-th annotation has property "p" = i / n.
GroundTruthSet graded(int n) {
  GroundTruthSet g;
  for (int i = 0; i < n; ++i) {
    g.images[1].push_back(Annotation{i + 1,
                                     BoundingBox(20.0 * i, 0, 10, 10),
                                     {{"p", static_cast<double>(n - 1 - i) / n}}});
  }
  return g;
}

}  // namespace

TEST_CASE("match examples") {
  const std::vector<BoundingBox> gts{{0, 0, 10, 10}, {50, 50, 10, 10}};
  const auto perfect = match({det(gts[0], 1.0), det(gts[1], 1.0)}, gts, 0.5);
  CHECK(perfect.pairs.size() == 2);
  CHECK(perfect.unmatched_detections.empty());
  const auto none = match({}, gts, 0.5);
  CHECK(none.unmatched_ground_truth == std::vector<std::size_t>{0, 1});

  // iou 0.9: (0,0,9,10); iou 0.95: (0,0,9.5,10)
  const std::vector<BoundingBox> one{{0, 0, 10, 10}};
  const std::vector<Detection> dets{det({0, 0, 9.5, 10}, 0.6), det({0, 0, 9, 10}, 0.8)};
  const auto m = match(dets, one, 0.5);
  REQUIRE(m.pairs.size() == 1);
  CHECK(m.pairs[0] == std::make_pair(std::size_t{1}, std::size_t{0}));
  CHECK(m.unmatched_detections == std::vector<std::size_t>{0});
}

TEST_CASE("ap/ar examples") {
  const std::map<ImageId, std::vector<BoundingBox>> boxes{
      {1, {{0, 0, 10, 10}, {40, 40, 20, 20}}}, {2, {{5, 5, 30, 30}}}};
  DetectionsByImage exact;
  for (const auto& [img, list] : boxes) {
    for (const auto& b : list) exact[img].push_back(det(b, 1.0, img));
  }
  const auto perfect = ap_ar(exact, gt_of(boxes));
  CHECK(perfect.ap == doctest::Approx(1.0));
  CHECK(perfect.ar == doctest::Approx(1.0));
  CHECK(perfect.per_iou.size() == 10);

  const auto empty = ap_ar({}, gt_of(boxes));
  CHECK(empty.ap == 0.0);
  CHECK(empty.ar == 0.0);

  const auto hand =
      ap_ar({{1, {det({0, 0, 6, 10}, 1.0)}}}, gt_of({{1, {{0, 0, 10, 10}}}}));
  CHECK(std::abs(hand.ap - 0.3) <= 1e-9);
  CHECK(std::abs(hand.ar - 0.3) <= 1e-9);

  CHECK(ap_ar(exact, GroundTruthSet{}).ap == 0.0);
}

TEST_CASE("only the best max_dets detections per image count") {
  const std::map<ImageId, std::vector<BoundingBox>> boxes{{1, {{0, 0, 10, 10}}}};
  DetectionsByImage dets;
  dets[1].push_back(det({0, 0, 10, 10}, 0.1));
  for (int i = 0; i < 3; ++i) dets[1].push_back(det({100.0 + 20 * i, 0, 10, 10}, 0.9));
  CHECK(ap_ar(dets, gt_of(boxes), 3).ar == 0.0);
  CHECK(ap_ar(dets, gt_of(boxes), 4).ar == 1.0);
}

TEST_CASE("ap/ar agree with the direct-definition reference") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> pos(0.0, 40.0);
  std::uniform_real_distribution<double> size(8.0, 20.0);
  std::uniform_real_distribution<double> jitter(-4.0, 4.0);
  std::uniform_int_distribution<int> ngt(0, 5);
  std::uniform_int_distribution<int> ndet(0, 8);
  std::uniform_int_distribution<int> score(1, 10);
  std::uniform_int_distribution<int> coin(0, 2);
  for (int trial = 0; trial < 500; ++trial) {
    std::map<ImageId, std::vector<BoundingBox>> gts;
    DetectionsByImage dets;
    for (ImageId img = 1; img <= 2; ++img) {
      auto& g = gts[img];
      for (int i = ngt(rng); i > 0; --i) g.emplace_back(pos(rng), pos(rng), size(rng), size(rng));
      for (int i = ndet(rng); i > 0; --i) {
        BoundingBox b(pos(rng), pos(rng), size(rng), size(rng));
        if (!g.empty() && coin(rng) != 0) {
          const BoundingBox& t = g[static_cast<std::size_t>(i) % g.size()];
          b = BoundingBox(t.x() + jitter(rng), t.y() + jitter(rng), t.w(), t.h());
        }
        dets[img].push_back(det(b, score(rng) / 10.0, img));
      }
    }
    const auto got = ap_ar(dets, gt_of(gts));
    const auto want = oracle::ap_ar(dets, gts);
    REQUIRE(got.ap == doctest::Approx(want.ap).epsilon(1e-12));
    REQUIRE(got.ar == doctest::Approx(want.ar).epsilon(1e-12));
  }
}

TEST_CASE("adding a perfect detection for a missed object never lowers ap or ar") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> pos(0.0, 500.0);
  std::uniform_int_distribution<int> score(1, 10);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<BoundingBox> g;
    for (int i = 0; i < 6; ++i) g.emplace_back(std::round(pos(rng)), std::round(pos(rng)), 15, 15);
    DetectionsByImage dets;
    for (int i = 0; i < 3; ++i) dets[1].push_back(det(g[i], score(rng) / 10.0));
    dets[1].push_back(det({900, 900, 10, 10}, 0.5));
    const auto gts = gt_of({{1, g}});
    const auto before = ap_ar(dets, gts);
    dets[1].push_back(det(g[4], score(rng) / 10.0));
    const auto after = ap_ar(dets, gts);
    CHECK(after.ap >= before.ap - 1e-15);
    CHECK(after.ar >= before.ar - 1e-15);
  }
}

TEST_CASE("property bins") {
  const auto b100 = property_bins(graded(100), "p");
  REQUIRE(b100.bins.size() == 50);
  for (const Bin& b : b100.bins) CHECK(b.count() == 2);
  const auto b101 = property_bins(graded(101), "p");
  REQUIRE(b101.bins.size() == 50);
  for (std::size_t i = 0; i + 1 < 50; ++i) CHECK(b101.bins[i].count() == 2);
  CHECK(b101.bins.back().count() == 3);

  // Sorted ascending: the first bin holds the two smallest values.
  CHECK(b100.bins[0].lo == 0.0);
  CHECK(b100.bins[0].members[0].index == 99);
  for (std::size_t i = 1; i < b100.bins.size(); ++i) {
    CHECK(b100.bins[i - 1].hi <= b100.bins[i].lo);
  }

  GroundTruthSet flat = graded(10);
  for (auto& a : flat.images[1]) a.properties["p"] = 0.5;
  const auto fb = property_bins(flat, "p", 0.5);
  REQUIRE(fb.bins.size() == 2);
  CHECK(fb.bins[0].members[0].index == 0);
  CHECK(fb.bins[1].members[0].index == 5);

  CHECK_THROWS_AS(property_bins(graded(4), "missing"), PropertyError);
}

TEST_CASE("binned recall") {
  const GroundTruthSet g = graded(100);
  DetectionsByImage all;
  DetectionsByImage no_small;
  for (const Annotation& a : g.images.at(1)) {
    all[1].push_back(det(a.box, 1.0));
    if (a.properties.at("p") >= 0.02) no_small[1].push_back(det(a.box, 1.0));
  }
  const BinCurve bins = property_bins(g, "p");
  for (const Bin& b : binned_ar(all, g, bins).bins) CHECK(b.ar == doctest::Approx(1.0));
  for (const Bin& b : binned_ar({}, g, bins).bins) CHECK(b.ar == 0.0);
  const auto partial = binned_ar(no_small, g, bins);
  CHECK(partial.bins[0].ar == 0.0);
  for (std::size_t i = 1; i < partial.bins.size(); ++i) {
    CHECK(partial.bins[i].ar == doctest::Approx(1.0));
  }

  std::size_t total = 0;
  for (const Bin& b : bins.bins) total += b.count();
  CHECK(total == g.total());

  DetectionsByImage shuffled = no_small;
  std::reverse(shuffled[1].begin(), shuffled[1].end());
  const auto again = binned_ar(shuffled, g, bins);
  for (std::size_t i = 0; i < bins.bins.size(); ++i) {
    CHECK(again.bins[i].ar == partial.bins[i].ar);
  }
}

TEST_CASE("relative size and brightness") {
  const ImageSize img(3840, 2160);
  CHECK(relative_size(img.bounds(), img) == doctest::Approx(1.0));
  CHECK(relative_size(BoundingBox(0, 0, 38.4, 21.6), img) == doctest::Approx(0.01));
  CHECK(relative_size(BoundingBox(0, 0, 38.4, 21.6), ImageSize(7680, 4320)) ==
        doctest::Approx(0.005));

  const std::vector<std::uint8_t> black(16, 0);
  const std::vector<std::uint8_t> white(16, 255);
  std::vector<std::uint8_t> half(16, 0);
  std::fill(half.begin(), half.begin() + 8, std::uint8_t{255});
  CHECK(brightness(black) == 0.0);
  CHECK(brightness(white) == 1.0);
  CHECK(brightness(half) == doctest::Approx(0.5));
  CHECK_THROWS_AS(brightness(std::vector<std::uint8_t>{}), InvalidArgument);
}

TEST_CASE("ground truth property validation") {
  GroundTruthSet g = graded(3);
  CHECK_NOTHROW(g.validate());
  g.images[1][1].properties["p"] = 1.5;
  CHECK_THROWS_AS(g.validate(), PropertyError);
  g = graded(3);
  g.images[1][2].properties.erase("p");
  CHECK_THROWS_AS(g.validate(), PropertyError);
}
