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
#include <string>
#include <vector>

#include "mammopipe/augment.hpp"
#include "mammopipe/preprocess.hpp"
#include "mammopipe/rasterize.hpp"
#include "mammopipe/style_proxy.hpp"
#include "mammopipe/uncertainty.hpp"

namespace mammopipe::io {

inline constexpr int kFormatVersion = 1;

/// JSON sidecar accompanying raw binaries and preprocessed PNGs.
struct Sidecar {
  std::optional<int> width;
  std::optional<int> height;
  std::string dtype = "uint16";  // uint8 | uint16 | int16 | float32, little-endian
  std::optional<double> window_center;
  std::optional<double> window_width;
  std::optional<Vendor> vendor;
  std::optional<Laterality> laterality;
  std::optional<View> view;
  std::optional<double> spacing_m;
  bool degenerate = false;
};

Sidecar read_sidecar(const std::filesystem::path& path);
void write_sidecar(const std::filesystem::path& path, const Sidecar& s);
std::string sidecar_json(const Sidecar& s);

/// PNG (8/16-bit gray) or headerless little-endian binary described by
/// `sidecar`. Window parameters from the sidecar are attached.
RawImage load_raw_image(const std::filesystem::path& path, const std::optional<Sidecar>& sidecar);

/// [{"class": int, "points": [[x, y], ...]}, ...]
std::vector<Polygon> read_polygons(const std::filesystem::path& path);
std::vector<Polygon> parse_polygons(const std::string& json_text, const std::string& source);

/// {"style name": [256 numbers], ...}; keys starting with '_' are metadata.
StyleBank read_style_bank(const std::filesystem::path& path);
void write_style_bank(const std::filesystem::path& path, const StyleBank& bank);

/// Planar float32 maps: one JSON header line, then little-endian samples
/// (channels x height x width).
void write_prob_map(const std::filesystem::path& path, const ProbMap& map);
ProbMap read_prob_map(const std::filesystem::path& path);
void write_float_map(const std::filesystem::path& path, const FloatImage& map);
FloatImage read_float_map(const std::filesystem::path& path);

struct RunConfig {
  std::uint64_t seed = 0;
  MixPolicy policy = MixPolicy::combo20();
  double clahe_clip_limit = 0.01;
  double low_percentile = 2.0;
  double high_percentile = 98.0;
  double alpha = 0.05;
  UncertaintyStatistic tta_statistic = UncertaintyStatistic::normalized_entropy;
  std::string output_dir = "out";

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

std::string run_config_json(const RunConfig& c);
RunConfig parse_run_config(const std::string& json_text, const std::string& source);
RunConfig load_run_config(const std::filesystem::path& path);
void save_run_config(const std::filesystem::path& path, const RunConfig& c);

/// "style25", "combo20", or a JSON file {"original": w, "manipulated": w, ...}.
MixPolicy resolve_policy(const std::string& spec);

std::string outcome_json(const ManipulationOutcome& o, std::uint64_t seed, const std::string& sample_id);

}  // namespace mammopipe::io
