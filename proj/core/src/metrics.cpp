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

#include "mammopipe/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mammopipe {

namespace {

double ratio(std::uint64_t num, std::uint64_t den, const ClassCounts& c) {
  if (den == 0) return c.vacuous() ? 1.0 : 0.0;
  return static_cast<double>(num) / static_cast<double>(den);
}

// Exact squared Euclidean distance transform along one line
// (Felzenszwalb & Huttenlocher lower envelope of parabolas).
void edt_1d(const std::vector<double>& f, std::vector<double>& d, std::vector<int>& v,
            std::vector<double>& z) {
  const int n = static_cast<int>(f.size());
  constexpr double inf = std::numeric_limits<double>::infinity();
  int k = 0;
  v[0] = 0;
  z[0] = -inf;
  z[1] = inf;
  for (int q = 1; q < n; ++q) {
    if (f[static_cast<std::size_t>(q)] == inf) continue;
    if (f[static_cast<std::size_t>(v[0])] == inf) {
      v[0] = q;
      continue;
    }
    double s = 0.0;
    while (true) {
      const int p = v[static_cast<std::size_t>(k)];
      s = ((f[static_cast<std::size_t>(q)] + double(q) * q) - (f[static_cast<std::size_t>(p)] + double(p) * p)) /
          (2.0 * (q - p));
      if (s <= z[static_cast<std::size_t>(k)] && k > 0) {
        --k;
        continue;
      }
      break;
    }
    ++k;
    v[static_cast<std::size_t>(k)] = q;
    z[static_cast<std::size_t>(k)] = s;
    z[static_cast<std::size_t>(k) + 1] = inf;
  }
  if (f[static_cast<std::size_t>(v[0])] == inf) {
    std::fill(d.begin(), d.end(), inf);
    return;
  }
  k = 0;
  for (int q = 0; q < n; ++q) {
    while (z[static_cast<std::size_t>(k) + 1] < q) ++k;
    const int p = v[static_cast<std::size_t>(k)];
    d[static_cast<std::size_t>(q)] = double(q - p) * (q - p) + f[static_cast<std::size_t>(p)];
  }
}

}  // namespace

ConfusionCounts confusion(const LabelMap& pred, const LabelMap& gt) {
  if (!pred.same_shape(gt)) {
    throw std::invalid_argument("confusion: prediction is " + std::to_string(pred.width()) + "x" +
                                std::to_string(pred.height()) + ", ground truth is " +
                                std::to_string(gt.width()) + "x" + std::to_string(gt.height()));
  }
  // Joint histogram, then one-vs-rest reduction.
  std::array<std::array<std::uint64_t, kNumClasses>, kNumClasses> joint{};
  for (std::size_t i = 0; i < pred.size(); ++i) ++joint[index_of(pred[i])][index_of(gt[i])];

  const std::uint64_t total = pred.size();
  ConfusionCounts cc;
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    std::uint64_t pred_c = 0;
    std::uint64_t gt_c = 0;
    for (std::size_t o = 0; o < kNumClasses; ++o) {
      pred_c += joint[c][o];
      gt_c += joint[o][c];
    }
    ClassCounts& k = cc.per_class[c];
    k.tp = joint[c][c];
    k.fp = pred_c - k.tp;
    k.fn = gt_c - k.tp;
    k.tn = total - k.tp - k.fp - k.fn;
  }
  return cc;
}

double precision(const ClassCounts& c) { return ratio(c.tp, c.tp + c.fp, c); }
double recall(const ClassCounts& c) { return ratio(c.tp, c.tp + c.fn, c); }
double accuracy(const ClassCounts& c) { return ratio(c.tp + c.tn, c.total(), c); }
double dice(const ClassCounts& c) { return ratio(2 * c.tp, 2 * c.tp + c.fp + c.fn, c); }
double iou(const ClassCounts& c) { return ratio(c.tp, c.tp + c.fp + c.fn, c); }

std::string_view to_string(Metric m) {
  switch (m) {
    case Metric::precision: return "precision";
    case Metric::recall: return "recall";
    case Metric::accuracy: return "accuracy";
    case Metric::dice: return "dice";
    case Metric::iou: return "iou";
    case Metric::hausdorff: return "hausdorff";
  }
  return "unknown";
}

std::string_view display_name(Metric m) {
  switch (m) {
    case Metric::precision: return "Precision";
    case Metric::recall: return "Recall";
    case Metric::accuracy: return "Accuracy";
    case Metric::dice: return "Dice";
    case Metric::iou: return "IoU";
    case Metric::hausdorff: return "Hausdorff";
  }
  return "unknown";
}

Metric parse_metric(std::string_view s) {
  std::string n(s);
  std::transform(n.begin(), n.end(), n.begin(), [](unsigned char c) { return std::tolower(c); });
  if (n == "hausdorff_m") n = "hausdorff";
  for (Metric m : kAllMetrics) {
    if (to_string(m) == n) return m;
  }
  throw std::invalid_argument("unknown metric '" + std::string(s) + "'");
}

double directed_hausdorff_px(std::span<const PixelCoord> from, std::span<const PixelCoord> to) {
  if (from.empty() || to.empty()) throw std::invalid_argument("directed_hausdorff_px: empty point set");

  int x0 = std::numeric_limits<int>::max(), y0 = x0;
  int x1 = std::numeric_limits<int>::min(), y1 = x1;
  for (auto set : {from, to}) {
    for (const auto& p : set) {
      x0 = std::min(x0, p.x);
      y0 = std::min(y0, p.y);
      x1 = std::max(x1, p.x);
      y1 = std::max(y1, p.y);
    }
  }
  const int w = x1 - x0 + 1;
  const int h = y1 - y0 + 1;
  constexpr double inf = std::numeric_limits<double>::infinity();

  // Squared distance to the nearest `to` point over the bounding box.
  std::vector<double> grid(static_cast<std::size_t>(w) * h, inf);
  for (const auto& p : to) grid[static_cast<std::size_t>(p.y - y0) * w + (p.x - x0)] = 0.0;

  const int n = std::max(w, h);
  std::vector<double> f(static_cast<std::size_t>(n)), d(static_cast<std::size_t>(n));
  std::vector<int> v(static_cast<std::size_t>(n));
  std::vector<double> z(static_cast<std::size_t>(n) + 1);

  f.resize(static_cast<std::size_t>(h));
  d.resize(static_cast<std::size_t>(h));
  for (int x = 0; x < w; ++x) {
    for (int y = 0; y < h; ++y) f[static_cast<std::size_t>(y)] = grid[static_cast<std::size_t>(y) * w + x];
    edt_1d(f, d, v, z);
    for (int y = 0; y < h; ++y) grid[static_cast<std::size_t>(y) * w + x] = d[static_cast<std::size_t>(y)];
  }
  f.resize(static_cast<std::size_t>(w));
  d.resize(static_cast<std::size_t>(w));
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) f[static_cast<std::size_t>(x)] = grid[static_cast<std::size_t>(y) * w + x];
    edt_1d(f, d, v, z);
    for (int x = 0; x < w; ++x) grid[static_cast<std::size_t>(y) * w + x] = d[static_cast<std::size_t>(x)];
  }

  double worst = 0.0;
  for (const auto& p : from) {
    worst = std::max(worst, grid[static_cast<std::size_t>(p.y - y0) * w + (p.x - x0)]);
  }
  return std::sqrt(worst);
}

std::optional<double> hausdorff_avg(const ContourSet& pred, const ContourSet& gt, double spacing_m) {
  if (!(spacing_m > 0.0)) throw std::invalid_argument("hausdorff_avg: spacing must be > 0");
  if (pred.empty() || gt.empty()) return std::nullopt;
  const double ab = directed_hausdorff_px(pred.points, gt.points);
  const double ba = directed_hausdorff_px(gt.points, pred.points);
  return (ab + ba) / 2.0 * spacing_m;
}

std::optional<double> ClassScores::averaged(Metric m) const {
  if (vacuous && m != Metric::hausdorff) return std::nullopt;
  return get(m);
}

std::optional<double> MetricRecord::foreground_mean(Metric m) const {
  double sum = 0.0;
  int n = 0;
  for (ClassId c : kForegroundClasses) {
    if (auto v = (*this)[c].averaged(m)) {
      sum += *v;
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return sum / n;
}

MetricRecord evaluate_pair(std::string image_id, const LabelMap& pred, const LabelMap& gt,
                           std::optional<double> spacing_m) {
  MetricRecord rec;
  rec.image_id = std::move(image_id);
  rec.spacing_assumed = !spacing_m.has_value();
  rec.spacing_m = spacing_m.value_or(kDefaultSpacingM);

  const ConfusionCounts cc = confusion(pred, gt);
  for (ClassId c : kAllClasses) {
    const ClassCounts& k = cc[c];
    ClassScores& s = rec[c];
    s.vacuous = k.vacuous();
    s.values[static_cast<std::size_t>(Metric::precision)] = precision(k);
    s.values[static_cast<std::size_t>(Metric::recall)] = recall(k);
    s.values[static_cast<std::size_t>(Metric::accuracy)] = accuracy(k);
    s.values[static_cast<std::size_t>(Metric::dice)] = dice(k);
    s.values[static_cast<std::size_t>(Metric::iou)] = iou(k);
    s.values[static_cast<std::size_t>(Metric::hausdorff)] =
        hausdorff_avg(extract_contour(pred, c), extract_contour(gt, c), rec.spacing_m);
  }
  return rec;
}

std::optional<double> Summary::mean_column(Metric m) const {
  double sum = 0.0;
  int n = 0;
  for (ClassId c : kForegroundClasses) {
    if (const auto& v = cell(m, c).mean) {
      sum += *v;
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return sum / n;
}

Summary aggregate(std::span<const MetricRecord> records) {
  if (records.empty()) throw std::invalid_argument("aggregate: no records");
  Summary s;
  s.images = records.size();
  for (Metric m : kAllMetrics) {
    for (ClassId c : kAllClasses) {
      double sum = 0.0;
      SummaryCell& cell = s.cells[static_cast<std::size_t>(m)][index_of(c)];
      for (const auto& r : records) {
        if (auto v = r[c].averaged(m)) {
          sum += *v;
          ++cell.count;
        } else {
          ++cell.excluded;
        }
      }
      if (cell.count > 0) cell.mean = sum / static_cast<double>(cell.count);
    }
  }
  return s;
}

}  // namespace mammopipe
