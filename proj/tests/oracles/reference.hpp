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
#ifndef ORCHARD_TESTS_ORACLES_REFERENCE_HPP_
#define ORCHARD_TESTS_ORACLES_REFERENCE_HPP_

// Slow, direct reference implementations used to cross-check the library.
// They share no code with it beyond the value types and iou().

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <tuple>
#include <vector>

#include "orchard/alpha_shape.hpp"
#include "orchard/geometry.hpp"

namespace orchard::oracle {

inline auto rank_key(const Detection& d) {
  return std::make_tuple(-d.score(), d.box().x(), d.box().y(), d.box().w(), d.box().h());
}

// Literal greedy suppression over an explicit work list.
inline std::vector<Detection> nms(std::vector<Detection> rest, double thr) {
  std::sort(rest.begin(), rest.end(),
            [](const Detection& a, const Detection& b) { return rank_key(a) < rank_key(b); });
  std::vector<Detection> out;
  while (!rest.empty()) {
    const Detection best = rest.front();
    rest.erase(rest.begin());
    out.push_back(best);
    std::erase_if(rest, [&](const Detection& d) { return iou(best.box(), d.box()) > thr; });
  }
  return out;
}

// Flags which ranked detections are true positives at `thr`. Enumerates every
// injective assignment and keeps the one whose per-detection (iou, -gt index)
// sequence is lexicographically largest in rank order.
inline std::vector<char> brute_force_tp(const std::vector<Detection>& ranked,
                                        const std::vector<BoundingBox>& gts,
                                        double thr) {
  using Key = std::vector<std::pair<double, long>>;
  Key best_key;
  std::vector<char> best_tp(ranked.size(), 0);
  bool have = false;
  std::vector<char> used(gts.size(), 0);
  Key key;
  std::vector<char> tp;
  std::function<void(std::size_t)> rec = [&](std::size_t k) {
    if (k == ranked.size()) {
      if (!have || key > best_key) {
        best_key = key;
        best_tp = tp;
        have = true;
      }
      return;
    }
    key.emplace_back(-1.0, 0);
    tp.push_back(0);
    rec(k + 1);
    key.pop_back();
    tp.pop_back();
    for (std::size_t g = 0; g < gts.size(); ++g) {
      if (used[g]) continue;
      const double v = iou(ranked[k].box(), gts[g]);
      if (v < thr) continue;
      used[g] = 1;
      key.emplace_back(v, -static_cast<long>(g));
      tp.push_back(1);
      rec(k + 1);
      key.pop_back();
      tp.pop_back();
      used[g] = 0;
    }
  };
  rec(0);
  return best_tp;
}

struct ApAr {
  double ap = 0.0;
  double ar = 0.0;
};

// COCO-style AP/AR from the definitions: 10 thresholds, top max_dets per
// image, interpolated precision p(r) = max precision at recall >= r sampled at
// r = 0, 0.01, ..., 1, AR = recall after all detections.
inline ApAr ap_ar(const std::map<ImageId, std::vector<Detection>>& dets,
                  const std::map<ImageId, std::vector<BoundingBox>>& gts,
                  std::size_t max_dets = 100) {
  std::vector<ImageId> ids;
  for (const auto& [id, g] : gts) ids.push_back(id);
  for (const auto& [id, d] : dets) ids.push_back(id);
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());

  std::vector<std::vector<Detection>> ranked(ids.size());
  std::vector<std::vector<BoundingBox>> truth(ids.size());
  std::size_t num_gt = 0;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (auto it = dets.find(ids[i]); it != dets.end()) ranked[i] = it->second;
    std::stable_sort(ranked[i].begin(), ranked[i].end(), [](const Detection& a, const Detection& b) {
      return rank_key(a) < rank_key(b);
    });
    if (ranked[i].size() > max_dets) {
      ranked[i].erase(ranked[i].begin() + static_cast<long>(max_dets), ranked[i].end());
    }
    if (auto it = gts.find(ids[i]); it != gts.end()) truth[i] = it->second;
    num_gt += truth[i].size();
  }

  ApAr total;
  for (int t = 0; t < 10; ++t) {
    const double thr = (50.0 + 5.0 * t) / 100.0;
    struct Entry {
      double score;
      std::size_t image;
      std::size_t rank;
      char tp;
    };
    std::vector<Entry> all;
    for (std::size_t i = 0; i < ids.size(); ++i) {
      const std::vector<char> tp = brute_force_tp(ranked[i], truth[i], thr);
      for (std::size_t r = 0; r < ranked[i].size(); ++r) {
        all.push_back({ranked[i][r].score(), i, r, tp[r]});
      }
    }
    std::sort(all.begin(), all.end(), [](const Entry& a, const Entry& b) {
      return std::make_tuple(-a.score, a.image, a.rank) <
             std::make_tuple(-b.score, b.image, b.rank);
    });
    double ap = 0.0;
    double ar = 0.0;
    if (num_gt > 0 && !all.empty()) {
      std::vector<double> precision, recall;
      std::size_t hits = 0;
      for (std::size_t k = 0; k < all.size(); ++k) {
        hits += static_cast<std::size_t>(all[k].tp);
        precision.push_back(static_cast<double>(hits) / static_cast<double>(k + 1));
        recall.push_back(static_cast<double>(hits) / static_cast<double>(num_gt));
      }
      double sum = 0.0;
      for (int r = 0; r <= 100; ++r) {
        const double level = static_cast<double>(r) / 100.0;
        double p = 0.0;
        for (std::size_t k = 0; k < all.size(); ++k) {
          if (recall[k] >= level) p = std::max(p, precision[k]);
        }
        sum += p;
      }
      ap = sum / 101.0;
      ar = recall.back();
    }
    total.ap += ap;
    total.ar += ar;
  }
  total.ap /= 10.0;
  total.ar /= 10.0;
  return total;
}

// Convex hull area by Andrew's monotone chain.
inline double convex_hull_area(std::vector<Point2> pts) {
  std::sort(pts.begin(), pts.end(), [](const Point2& a, const Point2& b) {
    return std::tie(a.x, a.y) < std::tie(b.x, b.y);
  });
  auto cross = [](const Point2& o, const Point2& a, const Point2& b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
  };
  std::vector<Point2> hull(2 * pts.size());
  std::size_t k = 0;
  for (const Point2& p : pts) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  double twice = 0.0;
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const Point2& a = hull[i];
    const Point2& b = hull[(i + 1) % hull.size()];
    twice += a.x * b.y - b.x * a.y;
  }
  return std::fabs(twice) / 2.0;
}

// Exact for integer coordinates below ~2^20.
inline bool strictly_in_circumcircle(const Point2& a, const Point2& b, const Point2& c,
                                     const Point2& d) {
  using I = __int128;
  const I adx = static_cast<I>(a.x - d.x), ady = static_cast<I>(a.y - d.y);
  const I bdx = static_cast<I>(b.x - d.x), bdy = static_cast<I>(b.y - d.y);
  const I cdx = static_cast<I>(c.x - d.x), cdy = static_cast<I>(c.y - d.y);
  const I det = (adx * adx + ady * ady) * (bdx * cdy - bdy * cdx) -
                (bdx * bdx + bdy * bdy) * (adx * cdy - ady * cdx) +
                (cdx * cdx + cdy * cdy) * (adx * bdy - ady * bdx);
  const I orient = static_cast<I>((b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x));
  return orient > 0 ? det > 0 : det < 0;
}

inline double circumradius(const Point2& a, const Point2& b, const Point2& c) {
  const double la = std::hypot(b.x - c.x, b.y - c.y);
  const double lb = std::hypot(a.x - c.x, a.y - c.y);
  const double lc = std::hypot(a.x - b.x, a.y - b.y);
  const double area2 = std::fabs((b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x));
  return la * lb * lc / (2.0 * area2);
}

// Connected components (sharing an edge) of all empty-circumcircle triangles
// with circumradius <= alpha, found by enumerating every point triple. Only
// meaningful for point sets in general position (no four cocircular points).
inline int alpha_components(const std::vector<Point2>& pts, double alpha) {
  const std::size_t n = pts.size();
  std::vector<std::array<std::size_t, 3>> kept;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      for (std::size_t k = j + 1; k < n; ++k) {
        const Point2 &a = pts[i], &b = pts[j], &c = pts[k];
        if ((b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x) == 0.0) continue;
        bool empty = true;
        for (std::size_t m = 0; m < n && empty; ++m) {
          if (m != i && m != j && m != k && strictly_in_circumcircle(a, b, c, pts[m])) {
            empty = false;
          }
        }
        if (empty && oracle::circumradius(a, b, c) <= alpha) kept.push_back({i, j, k});
      }
    }
  }
  std::vector<std::size_t> parent(kept.size());
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
    return parent[x] == x ? x : parent[x] = find(parent[x]);
  };
  auto shares_edge = [](const std::array<std::size_t, 3>& s, const std::array<std::size_t, 3>& t) {
    int common = 0;
    for (std::size_t u : s) common += static_cast<int>(std::count(t.begin(), t.end(), u));
    return common >= 2;
  };
  for (std::size_t s = 0; s < kept.size(); ++s) {
    for (std::size_t t = s + 1; t < kept.size(); ++t) {
      if (shares_edge(kept[s], kept[t])) parent[find(s)] = find(t);
    }
  }
  int roots = 0;
  for (std::size_t s = 0; s < kept.size(); ++s) roots += find(s) == s;
  return roots;
}

}  // namespace orchard::oracle

#endif  // ORCHARD_TESTS_ORACLES_REFERENCE_HPP_
