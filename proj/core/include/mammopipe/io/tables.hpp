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

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "mammopipe/metrics.hpp"
#include "mammopipe/stats.hpp"

namespace mammopipe::io {

/// Per-image CSV: one row per (image, class).
std::string metrics_csv(const std::string& method, const std::vector<MetricRecord>& records);
/// Reads one or more methods back; rows are grouped by the method column
/// in first-seen order.
std::vector<stats::MethodRecords> read_metrics_csv(const std::filesystem::path& path);

struct MethodSummary {
  std::string method;
  Summary summary;
};

/// Long format: method,metric,structure,mean,n,excluded. Structure rows
/// cover the four foreground classes plus "mean".
std::string summary_csv(const std::vector<MethodSummary>& summaries);
std::vector<MethodSummary> read_summary_csv(const std::filesystem::path& path);

/// metric,structure,kw_h,kw_p,method_a,method_b,z,p_adj (significant pairs only).
std::string significance_csv(const stats::SignificanceReport& report);

struct RenderedReport {
  std::string text;
  std::string csv;
};

/// Metric x method x structure tables with columns Nipple, Pectoral,
/// Fib. Tissue, Fat. Tissue, Mean at four decimals. Undefined cells print
/// as an em dash followed by the exclusion count.
RenderedReport render_report(const std::vector<MethodSummary>& summaries);

}  // namespace mammopipe::io
