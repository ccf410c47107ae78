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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <ostream>
#include <string>
#include <vector>

#include "mammopipe/io/formats.hpp"

namespace mammopipe::cli {

namespace fs = std::filesystem;

/// Bad flag values or combinations; reported with exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Diagnostics go to `err`; counts and output paths to `out`.
struct Console {
  std::ostream& out;
  std::ostream& err;
};

struct PreprocessArgs {
  fs::path manifest;
  fs::path out;
  bool unit_float = false;
};

struct AugmentArgs {
  fs::path manifest;
  fs::path out;
};

struct StylizePostArgs {
  fs::path manifest;
  fs::path out;
};

struct StyleBankArgs {
  fs::path manifest;
  fs::path out;
};

struct StyleApplyArgs {
  fs::path manifest;
  fs::path bank;
  std::string style;
  fs::path out;
};

struct MixArgs {
  std::vector<std::string> sources;  // CATEGORY=manifest.csv
  std::size_t count = 0;
  fs::path out;
};

struct EvaluateArgs {
  fs::path manifest;
  std::optional<fs::path> pred_dir;
  std::string method = "method";
  fs::path out;
  std::optional<fs::path> summary;
  std::optional<double> spacing_default;
};

struct CompareArgs {
  std::vector<fs::path> metrics;
  fs::path out;
};

struct UncertaintyArgs {
  fs::path manifest;
  fs::path out;
};

struct ReportArgs {
  std::vector<fs::path> summaries;
  fs::path out;
  std::optional<fs::path> csv;
};

void cmd_preprocess(const PreprocessArgs& a, const io::RunConfig& cfg, Console& con);
void cmd_rasterize(const fs::path& polygons, int width, int height, const fs::path& out, Console& con);
void cmd_augment(const AugmentArgs& a, const io::RunConfig& cfg, Console& con);
void cmd_stylize_post(const StylizePostArgs& a, Console& con);
void cmd_style_bank(const StyleBankArgs& a, Console& con);
void cmd_style_apply(const StyleApplyArgs& a, Console& con);
void cmd_mix(const MixArgs& a, const io::RunConfig& cfg, Console& con);
void cmd_evaluate(const EvaluateArgs& a, Console& con);
void cmd_compare_stats(const CompareArgs& a, const io::RunConfig& cfg, Console& con);
void cmd_uncertainty(const UncertaintyArgs& a, const io::RunConfig& cfg, Console& con);
void cmd_report(const ReportArgs& a, Console& con);

}  // namespace mammopipe::cli
