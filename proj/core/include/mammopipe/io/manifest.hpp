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
#include <optional>
#include <string>
#include <vector>

#include "mammopipe/types.hpp"

namespace mammopipe::io {

/// One sample row. Paths are absolute after reading (resolved against the
/// manifest's directory).
struct ManifestRow {
  std::string id;
  std::filesystem::path image;
  std::filesystem::path labels;  // may be empty
  Vendor vendor = Vendor::ge;
  Laterality laterality = Laterality::right;
  View view = View::mlo;
  std::optional<double> spacing_m;
  std::optional<double> window_center;
  std::optional<double> window_width;
  std::string where;  // "file:line", for error messages
};

/// CSV columns: id,image,labels,vendor,laterality,view,spacing_m,
/// window_center,window_width. `image` and `id` are required; ids must be
/// unique. Rows come back in file order.
std::vector<ManifestRow> read_manifest(const std::filesystem::path& path);
/// Paths are written relative to the manifest's directory.
void write_manifest(const std::filesystem::path& path, const std::vector<ManifestRow>& rows);

/// Evaluation pairs: id,pred_path,gt_path,spacing_m.
struct EvalRow {
  std::string id;
  std::filesystem::path pred;
  std::filesystem::path gt;
  std::optional<double> spacing_m;
  std::string where;
};

std::vector<EvalRow> read_eval_manifest(const std::filesystem::path& path);

}  // namespace mammopipe::io
