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
#include "orchard/alpha_shape.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <unordered_map>

#include "orchard/errors.hpp"

namespace orchard {

namespace {

// Lattice resolution: 256 steps per pixel. With |coordinate| < 2^29 steps the
// in-circle determinant stays below 2^125 and fits in a signed 128-bit value.
constexpr double kLatticeScale = 256.0;
constexpr std::int64_t kLatticeLimit = std::int64_t{1} << 29;

using Wide = __int128;

struct LatticePoint {
  std::int64_t x;
  std::int64_t y;
  auto operator<=>(const LatticePoint&) const = default;
};

int sign(Wide v) { return (v > 0) - (v < 0); }

// > 0 when c lies left of a->b.
int orient(const LatticePoint& a, const LatticePoint& b,
           const LatticePoint& c) {
  const Wide abx = b.x - a.x, aby = b.y - a.y;
  const Wide acx = c.x - a.x, acy = c.y - a.y;
  return sign(abx * acy - aby * acx);
}

// > 0 when d lies strictly inside the circumcircle of the positively
// oriented triangle (a, b, c).
int incircle(const LatticePoint& a, const LatticePoint& b,
             const LatticePoint& c, const LatticePoint& d) {
  const Wide adx = a.x - d.x, ady = a.y - d.y;
  const Wide bdx = b.x - d.x, bdy = b.y - d.y;
  const Wide cdx = c.x - d.x, cdy = c.y - d.y;
  const Wide alift = adx * adx + ady * ady;
  const Wide blift = bdx * bdx + bdy * bdy;
  const Wide clift = cdx * cdx + cdy * cdy;
  const Wide det = alift * (bdx * cdy - bdy * cdx) -
                   blift * (adx * cdy - ady * cdx) +
                   clift * (adx * bdy - ady * bdx);
  return sign(det);
}

LatticePoint snap(Point2 p) {
  const double sx = std::round(p.x * kLatticeScale);
  const double sy = std::round(p.y * kLatticeScale);
  if (!std::isfinite(sx) || !std::isfinite(sy) ||
      std::fabs(sx) >= static_cast<double>(kLatticeLimit) ||
      std::fabs(sy) >= static_cast<double>(kLatticeLimit)) {
    throw InvalidArgument("point coordinate out of supported range");
  }
  return {static_cast<std::int64_t>(sx), static_cast<std::int64_t>(sy)};
}


struct Triangle {
  std::array<int, 3> v;
  // nbr[i] is the triangle across the edge opposite v[i]; -1 on the hull.
  std::array<int, 3> nbr{-1, -1, -1};
};

class Mesh {
 public:
  explicit Mesh(std::vector<LatticePoint> pts) : pts_(std::move(pts)) {}

  void build() {
    sweep();
    link();
    legalize();
  }

  const std::vector<LatticePoint>& points() const { return pts_; }
  const std::vector<Triangle>& triangles() const { return tris_; }

 private:
  // Any valid triangulation: points arrive in lexicographic order, so each new
  // point is outside the current hull and is fanned to the visible edges.
  void sweep() {
    const int n = static_cast<int>(pts_.size());
    int k = 2;
    while (k < n && orient(pts_[0], pts_[1], pts_[k]) == 0) ++k;
    if (k == n) throw DegenerateInput("all points are collinear");

    next_.assign(n, -1);
    prev_.assign(n, -1);
    // pts_[0..k-1] are collinear and sorted along their line.
    if (orient(pts_[0], pts_[1], pts_[k]) > 0) {
      for (int i = 0; i + 1 < k; ++i) add_triangle(i, i + 1, k);
      for (int i = 0; i + 1 < k; ++i) set_hull_edge(i, i + 1);
      set_hull_edge(k - 1, k);
      set_hull_edge(k, 0);
    } else {
      for (int i = 0; i + 1 < k; ++i) add_triangle(i + 1, i, k);
      for (int i = 0; i + 1 < k; ++i) set_hull_edge(i + 1, i);
      set_hull_edge(0, k);
      set_hull_edge(k, k - 1);
    }

    int last = k;
    for (int p = k + 1; p < n; ++p) {
      // Walk from the previous point (always on the hull) to find the
      // contiguous chain of edges that p sees strictly from outside.
      auto visible = [&](int a) { return orient(pts_[a], pts_[next_[a]], pts_[p]) < 0; };
      int start = last;
      if (!visible(start) && !visible(prev_[start])) {
        // The previous point is not adjacent to the visible chain; scan.
        int v = next_[start];
        while (v != start && !visible(v)) v = next_[v];
        start = v;
      }
      while (visible(prev_[start])) start = prev_[start];
      int end = start;
      while (visible(end)) {
        add_triangle(end, p, next_[end]);
        end = next_[end];
      }
      set_hull_edge(start, p);
      set_hull_edge(p, end);
      last = p;
    }
  }

  void add_triangle(int a, int b, int c) {
    tris_.push_back(Triangle{{a, b, c}});
  }

  void set_hull_edge(int a, int b) {
    next_[a] = b;
    prev_[b] = a;
  }

  static std::uint64_t edge_key(int a, int b) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
           static_cast<std::uint32_t>(b);
  }

  void link() {
    std::unordered_map<std::uint64_t, std::pair<int, int>> directed;
    directed.reserve(tris_.size() * 3);
    for (int t = 0; t < static_cast<int>(tris_.size()); ++t) {
      for (int i = 0; i < 3; ++i) {
        const int a = tris_[t].v[(i + 1) % 3];
        const int b = tris_[t].v[(i + 2) % 3];
        directed.emplace(edge_key(a, b), std::make_pair(t, i));
      }
    }
    for (int t = 0; t < static_cast<int>(tris_.size()); ++t) {
      for (int i = 0; i < 3; ++i) {
        const int a = tris_[t].v[(i + 1) % 3];
        const int b = tris_[t].v[(i + 2) % 3];
        auto it = directed.find(edge_key(b, a));
        if (it != directed.end()) tris_[t].nbr[i] = it->second.first;
      }
    }
  }

  int edge_index(int t, int a, int b) const {
    for (int i = 0; i < 3; ++i) {
      if (tris_[t].v[(i + 1) % 3] == a && tris_[t].v[(i + 2) % 3] == b) {
        return i;
      }
    }
    return -1;
  }

  void replace_neighbor(int t, int old_nbr, int new_nbr) {
    if (t < 0) return;
    for (int& n : tris_[t].nbr) {
      if (n == old_nbr) {
        n = new_nbr;
        return;
      }
    }
  }

  // Lawson flips until every interior edge is locally Delaunay.
  void legalize() {
    std::vector<int> stack(tris_.size());
    for (int t = 0; t < static_cast<int>(tris_.size()); ++t) stack[t] = t;
    while (!stack.empty()) {
      const int t = stack.back();
      stack.pop_back();
      for (int i = 0; i < 3; ++i) {
        const int u = tris_[t].nbr[i];
        if (u < 0) continue;
        const int c = tris_[t].v[i];
        const int a = tris_[t].v[(i + 1) % 3];
        const int b = tris_[t].v[(i + 2) % 3];
        const int j = edge_index(u, b, a);
        const int d = tris_[u].v[j];
        if (incircle(pts_[a], pts_[b], pts_[c], pts_[d]) <= 0) continue;

        const int na_t = tris_[t].nbr[(i + 1) % 3];  // across (b, c)
        const int nb_t = tris_[t].nbr[(i + 2) % 3];  // across (c, a)
        const int nb_u = tris_[u].nbr[(j + 1) % 3];  // across (a, d)
        const int na_u = tris_[u].nbr[(j + 2) % 3];  // across (d, b)

        tris_[t] = Triangle{{a, d, c}, {u, nb_t, nb_u}};
        tris_[u] = Triangle{{d, b, c}, {na_t, t, na_u}};
        replace_neighbor(na_t, t, u);
        replace_neighbor(nb_u, u, t);
        stack.push_back(t);
        stack.push_back(u);
        break;
      }
    }
  }

  std::vector<LatticePoint> pts_;
  std::vector<Triangle> tris_;
  std::vector<int> next_;
  std::vector<int> prev_;
};

// Lattice points in lexicographic order, each with the first input point that
// snapped to it.
struct Sites {
  std::vector<LatticePoint> lattice;
  std::vector<Point2> original;
};

Sites distinct_sorted(std::span<const Point2> points) {
  std::vector<std::pair<LatticePoint, std::size_t>> keyed;
  keyed.reserve(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) keyed.emplace_back(snap(points[i]), i);
  std::sort(keyed.begin(), keyed.end());
  Sites sites;
  for (const auto& [lp, i] : keyed) {
    if (!sites.lattice.empty() && sites.lattice.back() == lp) continue;
    sites.lattice.push_back(lp);
    sites.original.push_back(points[i]);
  }
  if (sites.lattice.size() < 3) {
    throw DegenerateInput("alpha shape needs at least three distinct points");
  }
  return sites;
}

}  // namespace

double signed_area(const Polygon& polygon) {
  const std::size_t n = polygon.size();
  double twice = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Point2& a = polygon[i];
    const Point2& b = polygon[(i + 1) % n];
    twice += a.x * b.y - b.x * a.y;
  }
  return 0.5 * twice;
}

double area(const PolygonSet& shape) {
  double total = 0.0;
  for (const Polygon& p : shape.polygons) total += std::fabs(signed_area(p));
  return total;
}

bool contains(const Polygon& polygon, Point2 p) {
  const std::size_t n = polygon.size();
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Point2& a = polygon[i];
    const Point2& b = polygon[j];
    const double cross = (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x);
    if (cross == 0.0 && p.x >= std::min(a.x, b.x) && p.x <= std::max(a.x, b.x) &&
        p.y >= std::min(a.y, b.y) && p.y <= std::max(a.y, b.y)) {
      return true;
    }
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x_cross = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < x_cross) inside = !inside;
    }
  }
  return inside;
}

double circumradius(Point2 a, Point2 b, Point2 c) {
  const double ab = std::hypot(b.x - a.x, b.y - a.y);
  const double bc = std::hypot(c.x - b.x, c.y - b.y);
  const double ca = std::hypot(a.x - c.x, a.y - c.y);
  const double twice_area =
      std::fabs((b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x));
  if (twice_area == 0.0) return std::numeric_limits<double>::infinity();
  return ab * bc * ca / (2.0 * twice_area);
}

Triangulation delaunay(std::span<const Point2> points) {
  Sites sites = distinct_sorted(points);
  Mesh mesh(std::move(sites.lattice));
  mesh.build();
  Triangulation out;
  out.vertices = std::move(sites.original);
  for (const Triangle& t : mesh.triangles()) out.triangles.push_back(t.v);
  return out;
}

AlphaShape alpha_shape(std::span<const Point2> points, double alpha) {
  if (!(alpha > 0.0)) throw InvalidArgument("alpha must be positive");
  Sites sites = distinct_sorted(points);
  Mesh mesh(std::move(sites.lattice));
  mesh.build();

  const std::vector<Point2> verts = std::move(sites.original);
  const auto& tris = mesh.triangles();

  std::vector<char> kept(tris.size(), 0);
  std::vector<char> covered(verts.size(), 0);
  AlphaShape result;
  for (std::size_t t = 0; t < tris.size(); ++t) {
    const auto& v = tris[t].v;
    if (circumradius(verts[v[0]], verts[v[1]], verts[v[2]]) <= alpha) {
      kept[t] = 1;
      ++result.kept_triangles;
      for (int idx : v) covered[idx] = 1;
    }
  }
  if (result.kept_triangles == 0) {
    throw EmptyShape("no Delaunay triangle has circumradius <= alpha");
  }
  for (std::size_t i = 0; i < verts.size(); ++i) {
    if (!covered[i]) result.isolated_points.push_back(verts[i]);
  }

  auto is_boundary = [&](int t, int i) {
    const int n = tris[t].nbr[i];
    return n < 0 || !kept[n];
  };
  // Boundary edge t:i runs v[i+1] -> v[i+2] with the kept region on its left.
  // The successor is found by rotating around the head vertex through kept
  // triangles until the next boundary edge, which keeps pinched components
  // in separate loops.
  std::vector<std::array<char, 3>> visited(tris.size(), {0, 0, 0});
  for (int t0 = 0; t0 < static_cast<int>(tris.size()); ++t0) {
    if (!kept[t0]) continue;
    for (int i0 = 0; i0 < 3; ++i0) {
      if (!is_boundary(t0, i0) || visited[t0][i0]) continue;
      Polygon loop;
      int t = t0, i = i0;
      while (!visited[t][i]) {
        visited[t][i] = 1;
        loop.push_back(verts[tris[t].v[(i + 1) % 3]]);
        const int head = tris[t].v[(i + 2) % 3];
        int cur = t;
        for (;;) {
          const auto& cv = tris[cur].v;
          const int j = cv[0] == head ? 0 : (cv[1] == head ? 1 : 2);
          const int opp = (j + 2) % 3;
          if (is_boundary(cur, opp)) {
            t = cur;
            i = opp;
            break;
          }
          cur = tris[cur].nbr[opp];
        }
      }
      if (signed_area(loop) > 0.0) result.shape.polygons.push_back(std::move(loop));
    }
  }
  return result;
}

}  // namespace orchard
