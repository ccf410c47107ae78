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

#include "mammopipe/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <stdexcept>

namespace mammopipe::stats {

namespace {

constexpr int kMaxIter = 1000;
constexpr double kEps = 1e-16;
constexpr double kTiny = 1e-300;

double gamma_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int n = 0; n < kMaxIter; ++n) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::abs(del) < std::abs(sum) * kEps) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Modified Lentz evaluation of the continued fraction for Q(a, x).
double gamma_continued_fraction(double a, double x) {
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxIter; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

void check_groups(std::span<const Population> groups) {
  if (groups.size() < 2) throw std::invalid_argument("need at least 2 groups");
  std::size_t n = 0;
  for (const auto& g : groups) {
    if (g.values.empty()) throw std::invalid_argument("group '" + g.method + "' is empty");
    n += g.values.size();
  }
  if (n < 3) throw std::invalid_argument("need at least 3 observations in total");
}

std::vector<double> mean_ranks(std::span<const Population> groups, const Ranking& r) {
  std::vector<double> means;
  std::size_t off = 0;
  for (const auto& g : groups) {
    double sum = 0.0;
    for (std::size_t i = 0; i < g.values.size(); ++i) sum += r.ranks[off + i];
    means.push_back(sum / static_cast<double>(g.values.size()));
    off += g.values.size();
  }
  return means;
}

}  // namespace

double gamma_p(double a, double x) {
  if (!(a > 0.0) || x < 0.0) throw std::domain_error("gamma_p: requires a > 0, x >= 0");
  if (x == 0.0) return 0.0;
  if (x < a + 1.0) return gamma_series(a, x);
  return 1.0 - gamma_continued_fraction(a, x);
}

double gamma_q(double a, double x) {
  if (!(a > 0.0) || x < 0.0) throw std::domain_error("gamma_q: requires a > 0, x >= 0");
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - gamma_series(a, x);
  return gamma_continued_fraction(a, x);
}

double chi_square_sf(double x, double df) {
  if (x <= 0.0) return 1.0;
  return gamma_q(df / 2.0, x / 2.0);
}

double normal_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

Ranking midranks(std::span<const Population> groups) {
  std::vector<double> pooled;
  for (const auto& g : groups) pooled.insert(pooled.end(), g.values.begin(), g.values.end());
  std::vector<std::size_t> order(pooled.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return pooled[a] < pooled[b]; });

  Ranking r;
  r.ranks.assign(pooled.size(), 0.0);
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i + 1;
    while (j < order.size() && pooled[order[j]] == pooled[order[i]]) ++j;
    // Positions i..j-1 share the average of ranks i+1..j.
    const double mid = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) r.ranks[order[k]] = mid;
    const double t = static_cast<double>(j - i);
    r.tie_term += t * t * t - t;
    i = j;
  }
  return r;
}

KruskalResult kruskal_wallis(std::span<const Population> groups) {
  check_groups(groups);
  const Ranking r = midranks(groups);
  const auto means = mean_ranks(groups, r);
  const double n = static_cast<double>(r.ranks.size());

  KruskalResult res;
  res.df = static_cast<int>(groups.size()) - 1;
  const double correction = 1.0 - r.tie_term / (n * n * n - n);
  if (correction <= 0.0) return res;  // every value tied

  const double centre = (n + 1.0) / 2.0;
  double ss = 0.0;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const double d = means[g] - centre;
    ss += static_cast<double>(groups[g].values.size()) * d * d;
  }
  res.h = 12.0 / (n * (n + 1.0)) * ss / correction;
  res.p = chi_square_sf(res.h, res.df);
  return res;
}

std::vector<DunnPair> dunn_bonferroni(std::span<const Population> groups, double alpha) {
  check_groups(groups);
  const Ranking r = midranks(groups);
  const auto means = mean_ranks(groups, r);
  const double n = static_cast<double>(r.ranks.size());
  const std::size_t k = groups.size();
  const double m = static_cast<double>(k * (k - 1) / 2);
  const double variance = n * (n + 1.0) / 12.0 - r.tie_term / (12.0 * (n - 1.0));

  std::vector<DunnPair> out;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      DunnPair p;
      p.first = i;
      p.second = j;
      p.first_method = groups[i].method;
      p.second_method = groups[j].method;
      const double se = std::sqrt(variance * (1.0 / groups[i].values.size() +
                                              1.0 / groups[j].values.size()));
      p.z = se > 0.0 ? (means[i] - means[j]) / se : 0.0;
      p.p = std::min(1.0, 2.0 * normal_sf(std::abs(p.z)));
      p.p_adjusted = std::min(1.0, p.p * m);
      p.significant = p.p_adjusted < alpha;
      out.push_back(std::move(p));
    }
  }
  return out;
}

SignificanceReport significance_table(std::span<const MethodRecords> methods, double alpha) {
  if (methods.size() < 2) throw std::invalid_argument("significance_table: need at least 2 methods");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must be in (0, 1]");

  auto ids_of = [](const MethodRecords& m) {
    std::set<std::string> ids;
    for (const auto& r : m.records) {
      if (!ids.insert(r.image_id).second) {
        throw std::invalid_argument("method '" + m.method + "' lists image '" + r.image_id + "' twice");
      }
    }
    return ids;
  };
  const auto reference = ids_of(methods[0]);
  for (std::size_t i = 1; i < methods.size(); ++i) {
    if (ids_of(methods[i]) != reference) {
      throw std::invalid_argument("method '" + methods[i].method + "' covers different images than '" +
                                  methods[0].method + "'");
    }
  }

  SignificanceReport report;
  report.alpha = alpha;
  for (Metric metric : kAllMetrics) {
    for (ClassId cls : kForegroundClasses) {
      std::vector<Population> pops;
      for (const auto& m : methods) {
        Population p{m.method, {}};
        for (const auto& r : m.records) {
          if (auto v = r[cls].averaged(metric)) p.values.push_back(*v);
        }
        pops.push_back(std::move(p));
      }
      const bool usable =
          std::all_of(pops.begin(), pops.end(), [](const auto& p) { return !p.values.empty(); }) &&
          std::accumulate(pops.begin(), pops.end(), std::size_t{0},
                          [](std::size_t s, const auto& p) { return s + p.values.size(); }) >= 3;
      if (!usable) continue;

      SignificanceEntry e;
      e.metric = metric;
      e.structure = cls;
      e.kruskal = kruskal_wallis(pops);
      if (e.kruskal.p < alpha) {
        for (auto& pair : dunn_bonferroni(pops, alpha)) {
          if (pair.significant) e.pairs.push_back(std::move(pair));
        }
      }
      report.entries.push_back(std::move(e));
    }
  }
  return report;
}

}  // namespace mammopipe::stats
