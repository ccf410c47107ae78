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

#include "mammopipe/rasterize.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace mammopipe {

int z_order(ClassId cls) {
  switch (cls) {
    case ClassId::fatty: return 0;
    case ClassId::fibroglandular: return 1;
    case ClassId::pectoral: return 2;
    case ClassId::nipple: return 3;
    case ClassId::background: break;
  }
  return -1;
}

namespace {

void fill_polygon(LabelMap& out, const Polygon& poly) {
  const auto& v = poly.vertices;
  const std::size_t n = v.size();
  std::vector<double> xs;
  for (int y = 0; y < out.height(); ++y) {
    const double py = y + 0.5;
    xs.clear();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
      const Point2& a = v[i];
      const Point2& b = v[j];
      // Half-open crossing rule: an edge counts when py lies in [min, max).
      if ((a.y > py) != (b.y > py)) {
        xs.push_back((b.x - a.x) * (py - a.y) / (b.y - a.y) + a.x);
      }
    }
    std::sort(xs.begin(), xs.end());
    // A centre px is inside when an odd number of crossings lie right of it,
    // i.e. xs[2k] <= px < xs[2k+1].
    for (std::size_t k = 0; k + 1 < xs.size(); k += 2) {
      const double first = std::clamp(std::floor(xs[k] - 0.5), 0.0, static_cast<double>(out.width()));
      for (int x = static_cast<int>(first); x < out.width(); ++x) {
        const double px = x + 0.5;
        if (px >= xs[k + 1]) break;
        if (px >= xs[k]) out.at(x, y) = poly.cls;
      }
    }
  }
}

}  // namespace

LabelMap rasterize_polygons(const std::vector<Polygon>& polys, int width, int height) {
  if (width <= 0 || height <= 0) {
    throw std::invalid_argument("rasterize_polygons: width and height must be > 0");
  }
  for (std::size_t i = 0; i < polys.size(); ++i) {
    if (polys[i].vertices.size() < 3) {
      throw std::invalid_argument("polygon " + std::to_string(i) + " has fewer than 3 vertices");
    }
    if (polys[i].cls == ClassId::background) {
      throw std::invalid_argument("polygon " + std::to_string(i) + " has background class");
    }
  }

  std::vector<std::size_t> order(polys.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return z_order(polys[a].cls) < z_order(polys[b].cls);
  });

  LabelMap out(width, height);
  for (std::size_t idx : order) fill_polygon(out, polys[idx]);
  return out;
}

ContourSet extract_contour(const LabelMap& labels, ClassId cls) {
  ContourSet cs;
  cs.cls = cls;
  const int w = labels.width();
  const int h = labels.height();
  auto differs = [&](int x, int y) {
    return x < 0 || y < 0 || x >= w || y >= h || labels.at(x, y) != cls;
  };
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (labels.at(x, y) != cls) continue;
      if (differs(x - 1, y) || differs(x + 1, y) || differs(x, y - 1) || differs(x, y + 1)) {
        cs.points.push_back({x, y});
      }
    }
  }
  return cs;
}

}  // namespace mammopipe
