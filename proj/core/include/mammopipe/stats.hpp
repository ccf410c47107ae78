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

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "mammopipe/metrics.hpp"

namespace mammopipe::stats {

/// Per-image values of one metric on one structure for one method.
struct Population {
  std::string method;
  std::vector<double> values;
};

struct KruskalResult {
  double h = 0.0;  // tie-corrected
  double p = 1.0;
  int df = 0;
};

struct DunnPair {
  std::size_t first = 0;  // index into the populations
  std::size_t second = 0;
  std::string first_method;
  std::string second_method;
  double z = 0.0;  // (mean rank first - mean rank second) / se
  double p = 1.0;  // two-sided, unadjusted
  double p_adjusted = 1.0;
  bool significant = false;
};

/// Upper tail of the chi-square distribution, Q(df/2, x/2).
double chi_square_sf(double x, double df);
/// Upper tail of the standard normal, 0.5 erfc(z / sqrt 2).
double normal_sf(double z);
/// Regularized lower/upper incomplete gamma functions.
double gamma_p(double a, double x);
double gamma_q(double a, double x);

/// Mid-ranks (1-based) of the pooled sample, plus the tie term sum(t^3 - t).
struct Ranking {
  std::vector<double> ranks;  // pooled order: group 0 first
  double tie_term = 0.0;
};
Ranking midranks(std::span<const Population> groups);

/// Kruskal-Wallis H with mid-rank tie correction; p from chi-square with
/// k-1 degrees of freedom. Needs >= 2 non-empty groups and N >= 3.
/// All-identical data gives H = 0, p = 1.
KruskalResult kruskal_wallis(std::span<const Population> groups);

/// Two-sided Dunn test over all k(k-1)/2 pairs, Bonferroni-adjusted.
/// Pairs are ordered (0,1), (0,2), ..., (k-2,k-1).
std::vector<DunnPair> dunn_bonferroni(std::span<const Population> groups, double alpha);

/// Per-image metric records of one method on one dataset.
struct MethodRecords {
  std::string method;
  std::vector<MetricRecord> records;
};

struct SignificanceEntry {
  Metric metric = Metric::iou;
  ClassId structure = ClassId::nipple;
  KruskalResult kruskal;
  std::vector<DunnPair> pairs;  // significant pairs only
};

struct SignificanceReport {
  double alpha = 0.05;
  std::vector<SignificanceEntry> entries;
};

/// Kruskal-Wallis per (metric, structure) across methods; when it rejects
/// at alpha, Dunn pairs with adjusted p < alpha are listed. All methods
/// must cover the same image ids. Undefined per-image values are dropped
/// from their population.
SignificanceReport significance_table(std::span<const MethodRecords> methods, double alpha = 0.05);

}  // namespace mammopipe::stats
