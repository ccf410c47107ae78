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

// Acceptance run: one PASS/FAIL line per criterion, each with its runtime
// budget. Exit status is 0 only when every criterion passes.

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "mammopipe/augment.hpp"
#include "mammopipe/io/csv.hpp"
#include "mammopipe/metrics.hpp"
#include "mammopipe/preprocess.hpp"
#include "mammopipe/rasterize.hpp"
#include "mammopipe/stats.hpp"
#include "mammopipe/uncertainty.hpp"
#include "oracles.hpp"
#include "synthetic_dataset.hpp"
#include "test_support.hpp"

using namespace mammopipe;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& why) {
    if (!cond && ok) {
      ok = false;
      detail = why;
    }
  }
};

struct Criterion {
  int number;
  std::string name;
  double budget_s;
  std::function<Verdict()> run;
};

// ---------------------------------------------------------------- 1

Verdict table_arithmetic() {
  Verdict v;
  const io::CsvTable t = io::read_csv(test::data_dir() / "reference_tables.csv");
  double worst = 0.0;
  std::map<std::string, int> per_dataset;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const Metric m = parse_metric(t.get(i, "metric"));
    MetricRecord rec;
    rec.image_id = t.get(i, "dataset") + "/" + t.get(i, "method");
    const char* cols[] = {"nipple", "pectoral", "fib", "fat"};
    for (std::size_t k = 0; k < 4; ++k) {
      rec[kForegroundClasses[k]].values[static_cast<std::size_t>(m)] = io::parse_double(t.get(i, cols[k]), t.where(i));
    }
    const std::vector<MetricRecord> one{rec};
    const auto mean = aggregate(one).mean_column(m);
    const double printed = io::parse_double(t.get(i, "mean"), t.where(i));
    if (!mean) {
      v.require(false, t.where(i) + ": no mean");
      continue;
    }
    const double err = std::abs(*mean - printed);
    worst = std::max(worst, err);
    // Printed inputs are 4-decimal strings; the slack absorbs their binary rounding.
    v.require(err <= 1e-4 + 1e-12,
              fmt::format("{} {} {} {}: mean {:.6f} vs printed {:.4f}", t.get(i, "dataset"), t.get(i, "metric"),
                          t.get(i, "method"), "row", *mean, printed));
    ++per_dataset[t.get(i, "dataset")];
  }
  v.require(t.rows.size() == 96, fmt::format("expected 96 table rows, found {}", t.rows.size()));
  for (const char* d : {"GE", "IMS", "PLANMED", "HOLOGIC"}) {
    v.require(per_dataset[d] == 24, fmt::format("{}: {} rows", d, per_dataset[d]));
  }
  if (v.ok) v.detail = fmt::format("{} rows, max |mean - printed| = {:.2e}", t.rows.size(), worst);
  return v;
}

// ---------------------------------------------------------------- 2

double safe_ratio(std::uint64_t num, std::uint64_t den, bool vacuous) {
  if (den == 0) return vacuous ? 1.0 : 0.0;
  return double(num) / double(den);
}

std::vector<PixelCoord> boundary_brute(const LabelMap& m, ClassId c) {
  std::vector<PixelCoord> pts;
  for (int y = 0; y < m.height(); ++y) {
    for (int x = 0; x < m.width(); ++x) {
      if (m.at(x, y) != c) continue;
      int same = 0;
      const int nx[] = {x - 1, x + 1, x, x}, ny[] = {y, y, y - 1, y + 1};
      for (int k = 0; k < 4; ++k) {
        if (nx[k] >= 0 && ny[k] >= 0 && nx[k] < m.width() && ny[k] < m.height() && m.at(nx[k], ny[k]) == c) ++same;
      }
      if (same < 4) pts.push_back({x, y});
    }
  }
  return pts;
}

Verdict metric_oracle() {
  Verdict v;
  std::mt19937_64 gen(20240601);
  const double spacing = 7e-5;
  std::size_t hd_checked = 0;
  double worst_rel = 0.0;
  for (int trial = 0; trial < 1000 && v.ok; ++trial) {
    // Alternate pixel noise with blocky maps so contours vary in size.
    const LabelMap pred = trial % 2 ? test::random_labels(gen, 16, 16) : test::blob_labels(gen, 16, 16);
    const LabelMap gt = trial % 3 ? test::blob_labels(gen, 16, 16) : test::random_labels(gen, 16, 16);
    const MetricRecord rec = evaluate_pair("p", pred, gt, spacing);
    for (ClassId c : kAllClasses) {
      std::uint64_t tp = 0, fp = 0, fn = 0, tn = 0;
      for (int y = 0; y < 16; ++y) {
        for (int x = 0; x < 16; ++x) {
          const bool p = pred.at(x, y) == c, g = gt.at(x, y) == c;
          tp += p && g;
          fp += p && !g;
          fn += !p && g;
          tn += !p && !g;
        }
      }
      const bool vac = tp + fp + fn == 0;
      const std::array<double, 5> want{safe_ratio(tp, tp + fp, vac), safe_ratio(tp, tp + fn, vac),
                                       safe_ratio(tp + tn, tp + fp + fn + tn, vac),
                                       safe_ratio(2 * tp, 2 * tp + fp + fn, vac), safe_ratio(tp, tp + fp + fn, vac)};
      const ClassScores& s = rec[c];
      for (std::size_t k = 0; k < 5; ++k) {
        const auto got = s.values[k];
        v.require(got && *got == want[k], fmt::format("trial {} class {} {}: {} vs oracle {}", trial, class_name(c),
                                                      to_string(kAllMetrics[k]), got.value_or(-1.0), want[k]));
      }
      const auto a = boundary_brute(pred, c), b = boundary_brute(gt, c);
      const auto hd = s.get(Metric::hausdorff);
      if (a.empty() || b.empty()) {
        v.require(!hd, fmt::format("trial {} class {}: hausdorff defined with an empty contour", trial, class_name(c)));
        continue;
      }
      const double ref = test::hausdorff_brute(a, b, spacing);
      v.require(hd.has_value(), fmt::format("trial {} class {}: hausdorff missing", trial, class_name(c)));
      if (!hd) continue;
      const double rel = std::abs(*hd - ref) / std::max(ref, 1e-300);
      if (ref > 0) worst_rel = std::max(worst_rel, rel);
      v.require(ref == 0 ? *hd == 0 : rel <= 1e-12,
                fmt::format("trial {} class {}: hausdorff {} vs oracle {}", trial, class_name(c), *hd, ref));
      ++hd_checked;
    }
  }
  if (v.ok) v.detail = fmt::format("1000 pairs, {} hausdorff values, max rel err {:.1e}", hd_checked, worst_rel);
  return v;
}

// ---------------------------------------------------------------- 3

struct AnnotatedSample {
  GrayImage image;
  ManipulationMasks masks;
};

std::vector<AnnotatedSample> annotated_samples(int n) {
  std::vector<AnnotatedSample> out;
  for (int i = 0; i < n; ++i) {
    std::mt19937_64 gen(900 + static_cast<std::uint64_t>(i));
    const LabelMap labels = test::synthetic_anatomy(gen, 96, 80);
    std::normal_distribution<double> noise(0.0, 12.0);
    std::uniform_real_distribution<double> level(0.0, 1.0);
    const double fat = 70 + 40 * level(gen), fib = 150 + 40 * level(gen), nip = 170 + 50 * level(gen);
    GrayImage img(96, 80);
    for (std::size_t k = 0; k < labels.size(); ++k) {
      double base = 15;
      switch (labels[k]) {
        case ClassId::nipple: base = nip; break;
        case ClassId::pectoral: base = 210; break;
        case ClassId::fibroglandular: base = fib; break;
        case ClassId::fatty: base = fat; break;
        case ClassId::background: break;
      }
      img[k] = static_cast<std::uint8_t>(std::clamp(std::lround(base + noise(gen)), 0L, 255L));
    }
    out.push_back({img, ManipulationMasks::from_labels(labels)});
  }
  return out;
}

Verdict algorithm_properties() {
  Verdict v;
  const auto samples = annotated_samples(16);
  const int runs = 10000;
  const std::uint64_t seed = 31337;
  int early = 0, full = 0, zeroed = 0, stamped = 0, degraded = 0;
  std::vector<GrayImage> first(runs);
  for (int i = 0; i < runs; ++i) {
    const auto& s = samples[static_cast<std::size_t>(i) % samples.size()];
    SeededRng rng = SeededRng::for_index(seed, static_cast<std::uint64_t>(i));
    const ManipulationOutcome o = manipulate(s.image, s.masks, rng);
    first[static_cast<std::size_t>(i)] = o.image;
    v.require(o.image.same_shape(s.image), fmt::format("run {}: output shape changed", i));
    if (o.degraded) {  // input-driven fallback, not the coin
      ++degraded;
      continue;
    }
    if (!o.applied) {
      ++early;
      continue;
    }
    ++full;
    zeroed += o.background_zeroed;
    stamped += o.label_added;
    v.require(o.a_min <= o.mu_nipple, fmt::format("run {}: a_min {} > mu_nip {}", i, o.a_min, o.mu_nipple));
    for (double x : {o.a_min, o.a_max}) v.require(x >= 0.0 && x <= 255.0, fmt::format("run {}: bound {}", i, x));
  }
  // Replay with the same seeds.
  for (int i = 0; i < runs; ++i) {
    const auto& s = samples[static_cast<std::size_t>(i) % samples.size()];
    SeededRng rng = SeededRng::for_index(seed, static_cast<std::uint64_t>(i));
    v.require(manipulate(s.image, s.masks, rng).image == first[static_cast<std::size_t>(i)],
              fmt::format("run {}: replay differs", i));
  }
  const double f_early = double(early) / runs;
  const double f_zero = full ? double(zeroed) / full : 0.0;
  const double f_label = full ? double(stamped) / full : 0.0;
  v.require(degraded == 0, fmt::format("{} full runs degraded", degraded));
  v.require(std::abs(f_early - 0.5) <= 0.02, fmt::format("early-return fraction {:.4f}", f_early));
  v.require(std::abs(f_zero - 0.5) <= 0.02, fmt::format("background-zeroing fraction {:.4f}", f_zero));
  v.require(std::abs(f_label - 0.5) <= 0.02, fmt::format("label-stamping fraction {:.4f}", f_label));
  if (v.ok) {
    v.detail = fmt::format("early {:.4f}, zeroed {:.4f}, stamped {:.4f} over {} full runs; replay identical", f_early,
                           f_zero, f_label, full);
  }
  return v;
}

// ---------------------------------------------------------------- 4

std::vector<stats::Population> populations(const nlohmann::json& groups) {
  std::vector<stats::Population> out;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    out.push_back({"g" + std::to_string(i), groups[i].get<std::vector<double>>()});
  }
  return out;
}

Verdict statistics_golden() {
  Verdict v;
  const std::vector<stats::Population> g{{"a", {1, 2, 3}}, {"b", {4, 5, 6}}, {"c", {7, 8, 9}}};
  const auto kw = stats::kruskal_wallis(g);
  v.require(std::abs(kw.h - 7.2) <= 1e-9, fmt::format("H = {}", kw.h));
  const auto pairs = stats::dunn_bonferroni(g, 0.05);
  const auto it = std::find_if(pairs.begin(), pairs.end(), [](const auto& p) { return p.first == 0 && p.second == 2; });
  v.require(it != pairs.end(), "pair (a, c) missing");
  if (it != pairs.end()) {
    v.require(std::abs(it->z - (-2.683)) <= 0.001, fmt::format("z = {}", it->z));
    v.require(std::abs(it->p_adjusted - 0.0219) <= 0.00005, fmt::format("p_adj = {}", it->p_adjusted));
    v.require(it->significant && it->p_adjusted < 0.05, "pair (a, c) not significant");
  }

  const auto oracle = test::load_json("kruskal_dunn_oracle.json");
  double worst = 0.0;
  std::size_t compared = 0;
  for (const auto& c : oracle["random"]) {
    const auto groups = populations(c["groups"]);
    const auto r = stats::kruskal_wallis(groups);
    worst = std::max(worst, std::abs(r.p - c["p"].get<double>()));
    v.require(std::abs(r.p - c["p"].get<double>()) <= 1e-6, fmt::format("KW p {} vs {}", r.p, c["p"].get<double>()));
    const auto d = stats::dunn_bonferroni(groups, 0.05);
    v.require(d.size() == c["pairs"].size(), "Dunn pair count differs");
    for (std::size_t i = 0; i < std::min(d.size(), c["pairs"].size()); ++i) {
      const auto& ref = c["pairs"][i];
      for (auto [got, want] : {std::pair{d[i].p, ref["p"].get<double>()},
                               std::pair{d[i].p_adjusted, ref["p_adjusted"].get<double>()}}) {
        worst = std::max(worst, std::abs(got - want));
        v.require(std::abs(got - want) <= 1e-6, fmt::format("Dunn p {} vs {}", got, want));
      }
      ++compared;
    }
  }
  v.require(oracle["random"].size() == 50, "expected 50 oracle datasets");
  if (v.ok) {
    v.detail = fmt::format("H = {:.12f}, z = {:.4f}, p_adj = {:.4f}; 50 datasets, {} pairs, max |dp| {:.1e}", kw.h,
                           it->z, it->p_adjusted, compared, worst);
  }
  return v;
}

// ---------------------------------------------------------------- 5

Verdict preprocessing_formulas() {
  Verdict v;
  const auto wb = window_bounds(100, 40);
  v.require(wb.x_min == 70 && wb.x_max == 120, fmt::format("window bounds ({}, {})", wb.x_min, wb.x_max));
  const auto ib = inverted_window_bounds(100, 40);
  v.require(ib.x_min == -130 && ib.x_max == -80, fmt::format("inverted bounds ({}, {})", ib.x_min, ib.x_max));

  // Endpoints of both mappings land on 0 and 1.
  RawImage r(4, 1, 0.0);
  r[0] = 70;
  r[1] = 120;
  r[2] = 80;
  r[3] = 130;
  r.window_center = 100;
  r.window_width = 40;
  const RawImage w = window_rescale(r), inv = invert_window_rescale(r);
  v.require(w[0] == 0.0 && w[1] == 1.0, "window_rescale endpoints");
  v.require(inv[2] == 1.0 && inv[3] == 0.0, "invert_window_rescale endpoints");

  std::mt19937_64 gen(55);
  std::uniform_real_distribution<double> val(0, 4095), pa(0.01, 50), pb(-1e4, 1e4);
  double worst = 0.0;
  for (int t = 0; t < 50; ++t) {
    RawImage img(40, 30);
    for (auto& x : img.pixels()) x = std::round(val(gen));
    const auto base = percentile_normalize(img);
    const double a = pa(gen), b = pb(gen);
    RawImage moved = img;
    for (auto& x : moved.pixels()) x = a * x + b;
    const auto res = percentile_normalize(moved);
    for (std::size_t i = 0; i < img.size(); ++i) worst = std::max(worst, std::abs(res.image[i] - base.image[i]));
  }
  v.require(worst <= 1e-9, fmt::format("affine invariance error {}", worst));

  for (auto [wd, ht] : {std::pair{64, 64}, std::pair{100, 61}, std::pair{257, 130}, std::pair{8, 8}, std::pair{384, 384}}) {
    const GrayImage g = test::random_gray(gen, wd, ht);
    const auto tiling = clahe_tiling(wd, ht);
    v.require(tiling.grid_x == 8 && tiling.grid_y == 8, fmt::format("{}x{}: grid {}x{}", wd, ht, tiling.grid_x, tiling.grid_y));
    v.require(clahe_tile_mappings(g).size() == 64, fmt::format("{}x{}: mapping count", wd, ht));
    const GrayImage out = clahe(g);
    v.require(out.same_shape(wd, ht), "clahe changed the shape");
    for (auto px : out.pixels()) v.require(px <= 255, "clahe value out of range");
  }
  if (v.ok) v.detail = fmt::format("bounds (70,120)/(-130,-80); affine invariance max err {:.1e}; 8x8 grid", worst);
  return v;
}

// ---------------------------------------------------------------- 6

ProbMap uniform_map(int w, int h) {
  ProbMap p(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (std::size_t c = 0; c < kNumClasses; ++c) p.at(x, y, c) = 0.2f;
  return p;
}

ProbMap random_prob(std::mt19937_64& gen, int w, int h) {
  std::gamma_distribution<double> g(0.7, 1.0);
  ProbMap p(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      std::array<double, kNumClasses> raw{};
      double s = 0;
      for (auto& r : raw) s += (r = g(gen) + 1e-9);
      for (std::size_t c = 0; c < kNumClasses; ++c) p.at(x, y, c) = static_cast<float>(raw[c] / s);
    }
  }
  return p;
}

Verdict uncertainty_bounds() {
  Verdict v;
  std::mt19937_64 gen(8);
  const LabelMap labels = test::random_labels(gen, 12, 9);
  const std::vector<ProbMap> agree{ProbMap::one_hot(labels), ProbMap::one_hot(labels), ProbMap::one_hot(labels)};
  const FloatImage u_agree = uncertainty_map(agree);
  for (double x : u_agree.pixels()) v.require(x == 0.0, fmt::format("agreement gives {}", x));

  const std::vector<ProbMap> flat{uniform_map(12, 9)};
  const FloatImage u_flat = uncertainty_map(flat);
  for (double x : u_flat.pixels()) {
    v.require(std::abs(x - 1.0) <= 1e-6, fmt::format("uniform mean gives {}", x));
  }

  LabelMap other = labels;
  for (auto& c : other.pixels()) c = static_cast<ClassId>((index_of(c) + 1) % kNumClasses);
  const std::vector<ProbMap> split{ProbMap::one_hot(labels), ProbMap::one_hot(other)};
  const double half = std::log(2.0) / std::log(5.0);
  double worst = 0.0;
  const FloatImage u_split = uncertainty_map(split);
  for (double x : u_split.pixels()) worst = std::max(worst, std::abs(x - half));
  v.require(worst <= 1e-9, fmt::format("two disagreeing maps: error {}", worst));

  double perm_worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    std::vector<ProbMap> stack;
    const int k = 2 + t % 6;
    for (int i = 0; i < k; ++i) stack.push_back(random_prob(gen, 9, 7));
    for (auto stat : {UncertaintyStatistic::normalized_entropy, UncertaintyStatistic::max_prob_std}) {
      const FloatImage u = uncertainty_map(stack, stat);
      auto perm = stack;
      std::shuffle(perm.begin(), perm.end(), gen);
      const FloatImage p = uncertainty_map(perm, stat);
      for (std::size_t i = 0; i < u.size(); ++i) {
        v.require(u[i] >= 0.0 && u[i] <= 1.0, fmt::format("stack {}: value {}", t, u[i]));
        perm_worst = std::max(perm_worst, std::abs(u[i] - p[i]));
      }
    }
  }
  v.require(perm_worst <= 1e-12, fmt::format("permutation changes the map by {}", perm_worst));
  if (v.ok) v.detail = fmt::format("ln2/ln5 error {:.1e}; 100 stacks, permutation delta {:.1e}", worst, perm_worst);
  return v;
}

// ---------------------------------------------------------------- 7

Verdict mixer_frequencies() {
  Verdict v;
  std::string detail;
  for (auto [name, pol] : {std::pair{"style25", MixPolicy::style25()}, std::pair{"combo20", MixPolicy::combo20()}}) {
    std::map<SourceCategory, MixStream<std::uint64_t>::Provider> providers;
    for (SourceCategory c : kAllSourceCategories) providers[c] = [](std::uint64_t i) { return i; };
    MixStream<std::uint64_t> stream(providers, pol, SeededRng::for_sample(2024, name));
    std::array<int, kNumSourceCategories> counts{};
    const int n = 100000;
    for (int i = 0; i < n; ++i) ++counts[static_cast<std::size_t>(stream.next().category)];
    double worst = 0.0;
    for (SourceCategory c : kAllSourceCategories) {
      const double f = counts[static_cast<std::size_t>(c)] / double(n);
      worst = std::max(worst, std::abs(f - pol.weight(c)));
      v.require(std::abs(f - pol.weight(c)) <= 0.01,
                fmt::format("{} {}: {:.4f} vs {:.2f}", name, to_string(c), f, pol.weight(c)));
    }
    detail += fmt::format("{}{} max dev {:.4f}", detail.empty() ? "" : ", ", name, worst);
  }
  if (v.ok) v.detail = "10^5 draws each; " + detail;
  return v;
}

// ---------------------------------------------------------------- 8

Verdict rasterization_oracle() {
  Verdict v;
  std::mt19937_64 gen(4242);
  std::uniform_int_distribution<int> cls(1, 4);
  double worst_pixel = 0.0, worst_vertex = 0.0;
  int sharp = 0, empty = 0;
  for (int t = 0; t < 200; ++t) {
    const Polygon p = test::random_convex_polygon(gen, 32, 32, static_cast<ClassId>(cls(gen)), 3.0);
    const LabelMap m = rasterize_polygons({p}, 32, 32);
    v.require(m == test::rasterize_brute({p}, 32, 32), fmt::format("polygon {}: raster differs from oracle", t));

    // Contour pixel centres against the polygon outline, both directions.
    const auto contour = extract_contour(m, p.cls);
    if (contour.empty()) {  // sliver covering no pixel centre; nothing to round-trip
      ++empty;
      continue;
    }
    double to_outline = 0.0;
    for (const auto& q : contour.points) {
      to_outline = std::max(to_outline, test::distance_to_boundary(p.vertices, q.x + 0.5, q.y + 0.5));
    }
    double to_contour = 0.0;
    const auto& vs = p.vertices;
    for (std::size_t i = 0, j = vs.size() - 1; i < vs.size(); j = i++) {
      const double len = std::hypot(vs[i].x - vs[j].x, vs[i].y - vs[j].y);
      const int steps = std::max(1, static_cast<int>(std::ceil(len / 0.05)));
      for (int s = 0; s <= steps; ++s) {
        const double a = double(s) / steps;
        const double bx = vs[j].x + a * (vs[i].x - vs[j].x), by = vs[j].y + a * (vs[i].y - vs[j].y);
        double best = 1e300;
        for (const auto& q : contour.points) best = std::min(best, std::hypot(q.x + 0.5 - bx, q.y + 0.5 - by));
        to_contour = std::max(to_contour, best);
      }
    }
    // Every extracted pixel must sit on the outline to within a pixel
    // diagonal. The reverse direction is only reported: at sharp vertices of
    // thin polygons the tip can be far from every pixel centre.
    worst_pixel = std::max(worst_pixel, to_outline);
    worst_vertex = std::max(worst_vertex, to_contour);
    if (to_contour > std::sqrt(2.0)) ++sharp;
    v.require(to_outline <= std::sqrt(2.0) + 1e-12,
              fmt::format("polygon {}: contour pixel {:.4f} px from the outline", t, to_outline));
  }
  if (v.ok) {
    v.detail = fmt::format(
        "200 polygons exact; contour->outline max {:.4f} px; outline->contour max {:.4f} px ({} sharp, {} empty)",
        worst_pixel, worst_vertex, sharp, empty);
  }
  return v;
}

// ---------------------------------------------------------------- 9

int cli(std::vector<std::string> args, std::string& err_text) {
  args.insert(args.begin(), "mammopipe");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  err_text = err.str();
  return code;
}

std::map<std::string, std::string> snapshot(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) files[fs::relative(e.path(), root).generic_string()] = test::slurp(e.path());
  }
  return files;
}

Verdict end_to_end_determinism() {
  Verdict v;
  test::TempDir dir("acceptance_e2e");
  const fs::path manifest = test::write_synthetic_dataset(dir.path(), 20, 99);

  auto pipeline = [&](const fs::path& root) {
    std::string err;
    auto step = [&](std::vector<std::string> args) {
      const std::string name = args.front();
      const int code = cli(std::move(args), err);
      v.require(code == 0, fmt::format("{} exited {}: {}", name, code, err));
      return code == 0;
    };
    if (!step({"preprocess", "--manifest", manifest.string(), "--out", (root / "pre").string()})) return;
    if (!step({"augment", "--manifest", (root / "pre" / "manifest.csv").string(), "--seed", "2024", "--out",
               (root / "aug").string()})) {
      return;
    }
    const fs::path aug = root / "aug" / "manifest.csv";
    std::vector<std::string> cmp{"compare-stats", "--metrics"};
    const double noise[] = {0.02, 0.08, 0.15, 0.3};
    for (int k = 0; k < 4; ++k) {
      const std::string method = fmt::format("method{}", k);
      test::write_noisy_predictions(aug, root / "pred" / method, noise[k], 500 + static_cast<std::uint64_t>(k));
      const fs::path out = root / "eval" / (method + ".csv");
      if (!step({"evaluate", "--manifest", aug.string(), "--pred-dir", (root / "pred" / method).string(), "--method",
                 method, "--out", out.string()})) {
        return;
      }
      cmp.push_back(out.string());
    }
    cmp.insert(cmp.end(), {"--alpha", "0.05", "--out", (root / "significance.csv").string()});
    step(cmp);
  };

  pipeline(dir / "run1");
  pipeline(dir / "run2");
  if (!v.ok) return v;
  const auto a = snapshot(dir / "run1"), b = snapshot(dir / "run2");
  v.require(a.size() == b.size(), fmt::format("file counts differ: {} vs {}", a.size(), b.size()));
  std::size_t bytes = 0;
  for (const auto& [name, content] : a) {
    const auto it = b.find(name);
    v.require(it != b.end() && it->second == content, name + " differs between runs");
    bytes += content.size();
  }
  v.require(a.count("significance.csv") == 1, "no significance table");
  if (v.ok) v.detail = fmt::format("20 images, {} files ({} bytes) byte-identical", a.size(), bytes);
  return v;
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "table arithmetic", 1, table_arithmetic},
      {2, "metric oracle equivalence", 30, metric_oracle},
      {3, "manipulation properties", 60, algorithm_properties},
      {4, "statistics golden values", 10, statistics_golden},
      {5, "preprocessing formulas", 5, preprocessing_formulas},
      {6, "uncertainty bounds", 5, uncertainty_bounds},
      {7, "mixer frequencies", 5, mixer_frequencies},
      {8, "rasterization oracle", 30, rasterization_oracle},
      {9, "end-to-end determinism", 60, end_to_end_determinism},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v.ok = false;
      v.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs < c.budget_s;
    const bool pass = v.ok && in_time;
    if (!in_time && v.ok) v.detail += " (over time budget)";
    failures += !pass;
    fmt::print("criterion {} {:<28} {}  {:7.3f} s / {:g} s  {}\n", c.number, c.name, pass ? "PASS" : "FAIL", secs,
               c.budget_s, v.detail);
    std::fflush(stdout);
  }
  fmt::print("{} of {} criteria passed\n", criteria.size() - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
