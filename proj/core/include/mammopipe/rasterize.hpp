/**
 * Copyright 2026 The mammopipe Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <vector>

#include "mammopipe/types.hpp"

namespace mammopipe {

struct Point2 {
  double x;
  double y;
};

/// Closed annotator contour; the last vertex connects back to the first.
struct Polygon {
  ClassId cls = ClassId::fatty;
  std::vector<Point2> vertices;
};

struct PixelCoord {
  int x;
  int y;
  friend bool operator==(const PixelCoord&, const PixelCoord&) = default;
  friend auto operator<=>(const PixelCoord&, const PixelCoord&) = default;
};

/// Boundary pixels of one class, sorted row-major.
struct ContourSet {
  ClassId cls = ClassId::background;
  std::vector<PixelCoord> points;
  bool empty() const { return points.empty(); }
};

/// Draw rank used to resolve overlaps: fatty first, nipple last.
int z_order(ClassId cls);

/// Even-odd scanline fill sampled at pixel centres (x+0.5, y+0.5). Polygons
/// are drawn in ascending z_order (stable for equal classes), so later
/// structures overwrite earlier ones. Throws std::invalid_argument for
/// fewer than 3 vertices, a background polygon, or non-positive size.
LabelMap rasterize_polygons(const std::vector<Polygon>& polys, int width, int height);

/// Pixels of `cls` that are 4-adjacent to a different class or to the
/// image border.
ContourSet extract_contour(const LabelMap& labels, ClassId cls);

}  // namespace mammopipe
