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

#include "mammopipe/io/tables.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <map>

#include "mammopipe/io/csv.hpp"
#include "mammopipe/io/png.hpp"

namespace mammopipe::io {

namespace {

constexpr const char* kDash = "—";

std::string opt_cell(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

std::optional<double> opt_parse(const std::string& s, const std::string& where) {
  if (s.empty()) return std::nullopt;
  return parse_double(s, where);
}

std::string column_title(ClassId c) {
  switch (c) {
    case ClassId::nipple: return "Nipple";
    case ClassId::pectoral: return "Pectoral";
    case ClassId::fibroglandular: return "Fib. Tissue";
    case ClassId::fatty: return "Fat. Tissue";
    case ClassId::background: return "Background";
  }
  return "?";
}

std::string render_cell(const std::optional<double>& v, std::size_t excluded) {
  if (v) return fmt::format("{:.4f}", *v);
  return fmt::format("{} ({} excl.)", kDash, excluded);
}

}  // namespace

std::string metrics_csv(const std::string& method, const std::vector<MetricRecord>& records) {
  CsvWriter w("mammopipe.metrics v1",
              {"method", "image_id", "class", "precision", "recall", "accuracy", "dice", "iou",
               "hausdorff_m", "vacuous", "spacing_m", "spacing_assumed"});
  for (const auto& r : records) {
    for (ClassId c : kAllClasses) {
      const ClassScores& s = r[c];
      std::vector<std::string> row{method, r.image_id, std::string(class_name(c))};
      for (Metric m : kAllMetrics) row.push_back(opt_cell(s.get(m)));
      row.push_back(s.vacuous ? "1" : "0");
      row.push_back(format_double(r.spacing_m));
      row.push_back(r.spacing_assumed ? "1" : "0");
      w.add_row(row);
    }
  }
  return w.str();
}

std::vector<stats::MethodRecords> read_metrics_csv(const std::filesystem::path& path) {
  const CsvTable t = read_csv(path);
  for (const char* col : {"method", "image_id", "class", "precision", "recall", "accuracy", "dice", "iou",
                          "hausdorff_m", "vacuous"}) {
    t.require_column(col);
  }

  std::vector<stats::MethodRecords> out;
  std::map<std::string, std::size_t> method_index;
  std::vector<std::map<std::string, std::size_t>> record_index;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const std::string method = t.get(i, "method");
    auto [mit, fresh] = method_index.try_emplace(method, out.size());
    if (fresh) {
      out.push_back({method, {}});
      record_index.emplace_back();
    }
    auto& mr = out[mit->second];
    auto& idx = record_index[mit->second];
    const std::string id = t.get(i, "image_id");
    auto [rit, new_rec] = idx.try_emplace(id, mr.records.size());
    if (new_rec) {
      MetricRecord rec;
      rec.image_id = id;
      if (auto s = opt_parse(t.get(i, "spacing_m"), t.where(i))) rec.spacing_m = *s;
      rec.spacing_assumed = t.get(i, "spacing_assumed") == "1";
      mr.records.push_back(std::move(rec));
    }
    MetricRecord& rec = mr.records[rit->second];
    ClassId cls;
    try {
      cls = class_from_name(t.get(i, "class"));
    } catch (const std::invalid_argument& e) {
      throw IoError(t.where(i) + ": " + e.what());
    }
    ClassScores& s = rec[cls];
    for (Metric m : kAllMetrics) {
      const std::string col = m == Metric::hausdorff ? "hausdorff_m" : std::string(to_string(m));
      s.values[static_cast<std::size_t>(m)] = opt_parse(t.get(i, col), t.where(i) + " column " + col);
    }
    s.vacuous = t.get(i, "vacuous") == "1";
  }
  return out;
}

std::string summary_csv(const std::vector<MethodSummary>& summaries) {
  CsvWriter w("mammopipe.summary v1", {"method", "metric", "structure", "mean", "n", "excluded"});
  for (const auto& ms : summaries) {
    for (Metric m : kAllMetrics) {
      for (ClassId c : kForegroundClasses) {
        const SummaryCell& cell = ms.summary.cell(m, c);
        w.add_row({ms.method, std::string(to_string(m)), std::string(class_name(c)), opt_cell(cell.mean),
                   std::to_string(cell.count), std::to_string(cell.excluded)});
      }
      w.add_row({ms.method, std::string(to_string(m)), "mean", opt_cell(ms.summary.mean_column(m)),
                 std::to_string(ms.summary.images), "0"});
    }
  }
  return w.str();
}

std::vector<MethodSummary> read_summary_csv(const std::filesystem::path& path) {
  const CsvTable t = read_csv(path);
  for (const char* col : {"method", "metric", "structure", "mean", "n", "excluded"}) t.require_column(col);
  std::vector<MethodSummary> out;
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const std::string method = t.get(i, "method");
    auto [it, fresh] = index.try_emplace(method, out.size());
    if (fresh) out.push_back({method, {}});
    Summary& s = out[it->second].summary;
    const std::string structure = t.get(i, "structure");
    if (structure == "mean") continue;  // recomputed from the structure cells
    try {
      const Metric m = parse_metric(t.get(i, "metric"));
      const ClassId c = class_from_name(structure);
      SummaryCell& cell = s.cells[static_cast<std::size_t>(m)][index_of(c)];
      cell.mean = opt_parse(t.get(i, "mean"), t.where(i));
      cell.count = static_cast<std::size_t>(std::stoul(t.get(i, "n")));
      cell.excluded = static_cast<std::size_t>(std::stoul(t.get(i, "excluded")));
      s.images = std::max(s.images, cell.count + cell.excluded);
    } catch (const IoError&) {
      throw;
    } catch (const std::exception& e) {
      throw IoError(t.where(i) + ": " + e.what());
    }
  }
  return out;
}

std::string significance_csv(const stats::SignificanceReport& report) {
  CsvWriter w("mammopipe.significance v1 alpha=" + format_double(report.alpha),
              {"metric", "structure", "kw_h", "kw_p", "method_a", "method_b", "z", "p_adj"});
  for (const auto& e : report.entries) {
    for (const auto& p : e.pairs) {
      w.add_row({std::string(to_string(e.metric)), std::string(class_name(e.structure)),
                 format_double(e.kruskal.h), format_double(e.kruskal.p), p.first_method, p.second_method,
                 format_double(p.z), format_double(p.p_adjusted)});
    }
  }
  return w.str();
}

RenderedReport render_report(const std::vector<MethodSummary>& summaries) {
  RenderedReport r;
  CsvWriter w("mammopipe.report v1", {"Metric", "Method", "Nipple", "Pectoral", "Fib. Tissue",
                                      "Fat. Tissue", "Mean"});

  std::size_t method_w = 6;
  for (const auto& ms : summaries) method_w = std::max(method_w, ms.method.size());

  std::string header = fmt::format("{:<10} {:<{}}", "Metric", "Method", method_w);
  for (ClassId c : kForegroundClasses) header += fmt::format(" {:>14}", column_title(c));
  header += fmt::format(" {:>14}\n", "Mean");
  const std::string rule(header.size() - 1, '-');
  r.text = header + rule + "\n";

  for (Metric m : kAllMetrics) {
    bool first = true;
    for (const auto& ms : summaries) {
      std::vector<std::string> row{std::string(display_name(m)), ms.method};
      std::string line = fmt::format("{:<10} {:<{}}", first ? display_name(m) : "", ms.method, method_w);
      for (ClassId c : kForegroundClasses) {
        const SummaryCell& cell = ms.summary.cell(m, c);
        const std::string txt = render_cell(cell.mean, cell.excluded);
        row.push_back(txt);
        // Pad by code points so the dash counts as one column.
        const std::size_t extra = cell.mean ? 0 : 2;
        line += fmt::format(" {:>{}}", txt, 14 + extra);
      }
      const auto mean = ms.summary.mean_column(m);
      const std::string mtxt = render_cell(mean, 0);
      row.push_back(mtxt);
      line += fmt::format(" {:>{}}\n", mtxt, 14 + (mean ? 0 : 2));
      r.text += line;
      w.add_row(row);
      first = false;
    }
    r.text += rule + "\n";
  }
  r.csv = w.str();
  return r;
}

}  // namespace mammopipe::io
