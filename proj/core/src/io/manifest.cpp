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

#include "mammopipe/io/manifest.hpp"

#include <set>

#include "mammopipe/io/atomic_file.hpp"
#include "mammopipe/io/csv.hpp"
#include "mammopipe/io/png.hpp"

namespace mammopipe::io {

namespace {

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  if (p.empty()) return {};
  std::filesystem::path q(p);
  return q.is_absolute() ? q : (base / q).lexically_normal();
}

std::optional<double> opt_number(const CsvTable& t, std::size_t row, const char* col) {
  const std::string s = t.get(row, col);
  if (s.empty()) return std::nullopt;
  return parse_double(s, t.where(row) + " column " + col);
}

std::string rel(const std::filesystem::path& p, const std::filesystem::path& base) {
  if (p.empty()) return {};
  auto r = std::filesystem::absolute(p).lexically_normal().lexically_relative(base);
  return (r.empty() ? p : r).generic_string();
}

std::string opt_str(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

}  // namespace

std::vector<ManifestRow> read_manifest(const std::filesystem::path& path) {
  const CsvTable t = read_csv(path);
  t.require_column("id");
  t.require_column("image");
  const auto base = std::filesystem::absolute(path).parent_path();

  std::vector<ManifestRow> rows;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    ManifestRow r;
    r.id = t.get(i, "id");
    if (r.id.empty()) throw IoError(t.where(i) + ": empty id");
    if (!seen.insert(r.id).second) throw IoError(t.where(i) + ": duplicate id '" + r.id + "'");
    r.image = resolve(base, t.get(i, "image"));
    if (r.image.empty()) throw IoError(t.where(i) + ": empty image path");
    r.labels = resolve(base, t.get(i, "labels"));
    try {
      if (auto v = t.get(i, "vendor"); !v.empty()) r.vendor = parse_vendor(v);
      if (auto v = t.get(i, "laterality"); !v.empty()) r.laterality = parse_laterality(v);
      if (auto v = t.get(i, "view"); !v.empty()) r.view = parse_view(v);
    } catch (const std::invalid_argument& e) {
      throw IoError(t.where(i) + ": " + e.what());
    }
    r.spacing_m = opt_number(t, i, "spacing_m");
    r.window_center = opt_number(t, i, "window_center");
    r.window_width = opt_number(t, i, "window_width");
    r.where = t.where(i);
    rows.push_back(std::move(r));
  }
  return rows;
}

void write_manifest(const std::filesystem::path& path, const std::vector<ManifestRow>& rows) {
  const auto base = std::filesystem::absolute(path).parent_path();
  CsvWriter w("mammopipe.manifest v1", {"id", "image", "labels", "vendor", "laterality", "view",
                                        "spacing_m", "window_center", "window_width"});
  for (const auto& r : rows) {
    w.add_row({r.id, rel(r.image, base), rel(r.labels, base), std::string(to_string(r.vendor)),
               std::string(to_string(r.laterality)), std::string(to_string(r.view)),
               opt_str(r.spacing_m), opt_str(r.window_center), opt_str(r.window_width)});
  }
  write_text_file(path, w.str());
}

std::vector<EvalRow> read_eval_manifest(const std::filesystem::path& path) {
  const CsvTable t = read_csv(path);
  t.require_column("id");
  t.require_column("pred_path");
  t.require_column("gt_path");
  const auto base = std::filesystem::absolute(path).parent_path();
  std::vector<EvalRow> rows;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    EvalRow r;
    r.id = t.get(i, "id");
    if (!seen.insert(r.id).second) throw IoError(t.where(i) + ": duplicate id '" + r.id + "'");
    r.pred = resolve(base, t.get(i, "pred_path"));
    r.gt = resolve(base, t.get(i, "gt_path"));
    r.spacing_m = opt_number(t, i, "spacing_m");
    r.where = t.where(i);
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace mammopipe::io
