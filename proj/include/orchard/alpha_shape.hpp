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
#ifndef ORCHARD_ALPHA_SHAPE_HPP_
#define ORCHARD_ALPHA_SHAPE_HPP_

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace orchard {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point2&, const Point2&) = default;
};

using Polygon = std::vector<Point2>;

// Filled outlines of a possibly multi-component region. Polygons are simple,
// counter-clockwise in a y-down raster frame as seen by the shoelace formula
// (positive signed area), and may touch each other at isolated vertices.
struct PolygonSet {
  std::vector<Polygon> polygons;
};

// Shoelace signed area.
double signed_area(const Polygon& polygon);
double area(const PolygonSet& shape);

// Closed point-in-polygon test (boundary counts as inside).
bool contains(const Polygon& polygon, Point2 p);

struct Triangulation {
  // Distinct input points. Points that snap to the same 1/256 px lattice
  // point are merged, keeping the first; predicates run on the lattice.
  std::vector<Point2> vertices;
  // Counter-clockwise vertex triples.
  std::vector<std::array<int, 3>> triangles;
};

// Delaunay triangulation of the points. Coordinates are snapped to a 1/256 px
// lattice so that orientation and in-circle tests are exact; duplicates after
// snapping collapse to one vertex. Throws DegenerateInput for fewer than three
// distinct points or when all points are collinear, InvalidArgument for
// coordinates beyond +-2^21 px.
Triangulation delaunay(std::span<const Point2> points);

double circumradius(Point2 a, Point2 b, Point2 c);

struct AlphaShape {
  PolygonSet shape;
  // Input points not covered by any kept triangle.
  std::vector<Point2> isolated_points;
  std::size_t kept_triangles = 0;
};

// Union of the Delaunay triangles whose circumradius is <= alpha (pixels),
// returned as its outer boundary polygons. Interior holes are filled.
// Throws DegenerateInput (see delaunay), EmptyShape when no triangle
// survives, InvalidArgument for alpha <= 0.
AlphaShape alpha_shape(std::span<const Point2> points, double alpha);

}  // namespace orchard

#endif  // ORCHARD_ALPHA_SHAPE_HPP_
