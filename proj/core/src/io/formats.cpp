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

#include "mammopipe/io/formats.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "mammopipe/io/atomic_file.hpp"
#include "mammopipe/io/png.hpp"

namespace mammopipe::io {

using nlohmann::json;

namespace {

static_assert(std::endian::native == std::endian::little, "binary formats assume a little-endian host");

json parse_json(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw IoError(source + ": invalid JSON: " + e.what());
  }
}

template <typename T>
std::optional<T> opt(const json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  return j[key].get<T>();
}

struct MapHeader {
  int width;
  int height;
  int channels;
};

void write_planar(const std::filesystem::path& path, const char* kind, int width, int height,
                  int channels, const std::vector<float>& data) {
  json h;
  h["format"] = kind;
  h["version"] = kFormatVersion;
  h["width"] = width;
  h["height"] = height;
  h["channels"] = channels;
  h["dtype"] = "float32le";
  h["layout"] = "planar";
  std::string blob = h.dump();
  blob.push_back('\n');
  const std::size_t off = blob.size();
  blob.resize(off + data.size() * sizeof(float));
  std::memcpy(blob.data() + off, data.data(), data.size() * sizeof(float));
  write_text_file(path, blob);
}

std::vector<float> read_planar(const std::filesystem::path& path, const char* kind, MapHeader& hdr) {
  const std::string blob = read_text_file(path);
  const auto eol = blob.find('\n');
  if (eol == std::string::npos) throw IoError(path.string() + ": missing header line");
  const json h = parse_json(blob.substr(0, eol), path.string());
  try {
    if (h.at("format").get<std::string>() != kind) {
      throw IoError(path.string() + ": expected format '" + kind + "'");
    }
    if (h.at("version").get<int>() != kFormatVersion) throw IoError(path.string() + ": unsupported version");
    if (h.value("dtype", "float32le") != "float32le") throw IoError(path.string() + ": unsupported dtype");
    hdr = {h.at("width").get<int>(), h.at("height").get<int>(), h.at("channels").get<int>()};
  } catch (const json::exception& e) {
    throw IoError(path.string() + ": bad header: " + e.what());
  }
  const std::size_t n = static_cast<std::size_t>(hdr.width) * hdr.height * hdr.channels;
  if (blob.size() - eol - 1 != n * sizeof(float)) {
    throw IoError(path.string() + ": payload size does not match header");
  }
  std::vector<float> data(n);
  std::memcpy(data.data(), blob.data() + eol + 1, n * sizeof(float));
  return data;
}

json policy_to_json(const MixPolicy& p) {
  json j = json::object();
  for (SourceCategory c : kAllSourceCategories) j[std::string(to_string(c))] = p.weight(c);
  return j;
}

MixPolicy policy_from_json(const json& j, const std::string& source) {
  if (j.is_string()) return resolve_policy(j.get<std::string>());
  if (!j.is_object()) throw IoError(source + ": policy must be an object or preset name");
  MixPolicy p;
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!it.key().empty() && it.key()[0] == '_') continue;
    try {
      p.weights[static_cast<std::size_t>(parse_source_category(it.key()))] = it.value().get<double>();
    } catch (const std::exception& e) {
      throw IoError(source + ": policy entry '" + it.key() + "': " + e.what());
    }
  }
  try {
    p.validate();
  } catch (const std::invalid_argument& e) {
    throw IoError(source + ": " + e.what());
  }
  return p;
}

std::string statistic_name(UncertaintyStatistic s) {
  return s == UncertaintyStatistic::normalized_entropy ? "entropy" : "maxprob-std";
}

}  // namespace

Sidecar read_sidecar(const std::filesystem::path& path) {
  const json j = parse_json(read_text_file(path), path.string());
  Sidecar s;
  try {
    s.width = opt<int>(j, "width");
    s.height = opt<int>(j, "height");
    s.dtype = j.value("dtype", "uint16");
    s.window_center = opt<double>(j, "window_center");
    s.window_width = opt<double>(j, "window_width");
    if (auto v = opt<std::string>(j, "vendor")) s.vendor = parse_vendor(*v);
    if (auto v = opt<std::string>(j, "laterality")) s.laterality = parse_laterality(*v);
    if (auto v = opt<std::string>(j, "view")) s.view = parse_view(*v);
    s.spacing_m = opt<double>(j, "spacing_m");
    s.degenerate = j.value("degenerate", false);
  } catch (const std::exception& e) {
    throw IoError(path.string() + ": " + e.what());
  }
  return s;
}

std::string sidecar_json(const Sidecar& s) {
  json j;
  j["format"] = "mammopipe.sidecar";
  j["version"] = kFormatVersion;
  if (s.width) j["width"] = *s.width;
  if (s.height) j["height"] = *s.height;
  j["dtype"] = s.dtype;
  if (s.window_center) j["window_center"] = *s.window_center;
  if (s.window_width) j["window_width"] = *s.window_width;
  if (s.vendor) j["vendor"] = std::string(to_string(*s.vendor));
  if (s.laterality) j["laterality"] = std::string(to_string(*s.laterality));
  if (s.view) j["view"] = std::string(to_string(*s.view));
  if (s.spacing_m) j["spacing_m"] = *s.spacing_m;
  if (s.degenerate) j["degenerate"] = true;
  return j.dump(2) + "\n";
}

void write_sidecar(const std::filesystem::path& path, const Sidecar& s) {
  write_text_file(path, sidecar_json(s));
}

RawImage load_raw_image(const std::filesystem::path& path, const std::optional<Sidecar>& sidecar) {
  RawImage img;
  if (path.extension() == ".png" || path.extension() == ".PNG") {
    img = read_png_raw(path);
  } else {
    if (!sidecar || !sidecar->width || !sidecar->height) {
      throw IoError(path.string() + ": headerless binary needs a sidecar with width and height");
    }
    const int w = *sidecar->width;
    const int h = *sidecar->height;
    const std::string blob = read_text_file(path);
    const std::size_t n = static_cast<std::size_t>(w) * h;
    std::vector<double> data(n);
    auto expect = [&](std::size_t bytes) {
      if (blob.size() != n * bytes) {
        throw IoError(path.string() + ": expected " + std::to_string(n * bytes) + " bytes for " +
                      sidecar->dtype + " " + std::to_string(w) + "x" + std::to_string(h) + ", found " +
                      std::to_string(blob.size()));
      }
    };
    const auto* b = reinterpret_cast<const unsigned char*>(blob.data());
    if (sidecar->dtype == "uint8") {
      expect(1);
      for (std::size_t i = 0; i < n; ++i) data[i] = b[i];
    } else if (sidecar->dtype == "uint16") {
      expect(2);
      for (std::size_t i = 0; i < n; ++i) data[i] = static_cast<std::uint16_t>(b[2 * i] | (b[2 * i + 1] << 8));
    } else if (sidecar->dtype == "int16") {
      expect(2);
      for (std::size_t i = 0; i < n; ++i) {
        data[i] = static_cast<std::int16_t>(static_cast<std::uint16_t>(b[2 * i] | (b[2 * i + 1] << 8)));
      }
    } else if (sidecar->dtype == "float32") {
      expect(4);
      for (std::size_t i = 0; i < n; ++i) {
        float f;
        std::memcpy(&f, b + 4 * i, 4);
        data[i] = f;
      }
    } else {
      throw IoError(path.string() + ": unsupported dtype '" + sidecar->dtype + "'");
    }
    img = RawImage(w, h, std::move(data));
  }
  if (sidecar) {
    img.window_center = sidecar->window_center;
    img.window_width = sidecar->window_width;
  }
  return img;
}

std::vector<Polygon> parse_polygons(const std::string& json_text, const std::string& source) {
  const json j = parse_json(json_text, source);
  if (!j.is_array()) throw IoError(source + ": polygon file must be a JSON array");
  std::vector<Polygon> polys;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string where = source + ": polygon " + std::to_string(i);
    try {
      Polygon p;
      p.cls = class_from_index(j[i].at("class").get<int>());
      for (const auto& pt : j[i].at("points")) {
        if (!pt.is_array() || pt.size() != 2) throw IoError(where + ": points must be [x, y] pairs");
        p.vertices.push_back({pt[0].get<double>(), pt[1].get<double>()});
      }
      polys.push_back(std::move(p));
    } catch (const IoError&) {
      throw;
    } catch (const std::exception& e) {
      throw IoError(where + ": " + e.what());
    }
  }
  return polys;
}

std::vector<Polygon> read_polygons(const std::filesystem::path& path) {
  return parse_polygons(read_text_file(path), path.string());
}

StyleBank read_style_bank(const std::filesystem::path& path) {
  const json j = parse_json(read_text_file(path), path.string());
  if (!j.is_object()) throw IoError(path.string() + ": style bank must be a JSON object");
  StyleBank bank;
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!it.key().empty() && it.key()[0] == '_') continue;
    if (!it.value().is_array() || it.value().size() != 256) {
      throw IoError(path.string() + ": style '" + it.key() + "' must have 256 bins");
    }
    Histogram256 h{};
    for (std::size_t i = 0; i < 256; ++i) h[i] = it.value()[i].get<double>();
    bank.styles[it.key()] = h;
  }
  try {
    bank.validate();
  } catch (const std::invalid_argument& e) {
    throw IoError(path.string() + ": " + e.what());
  }
  return bank;
}

void write_style_bank(const std::filesystem::path& path, const StyleBank& bank) {
  json j;
  j["_format"] = "mammopipe.stylebank";
  j["_version"] = kFormatVersion;
  for (const auto& [name, h] : bank.styles) j[name] = std::vector<double>(h.begin(), h.end());
  write_text_file(path, j.dump() + "\n");
}

void write_prob_map(const std::filesystem::path& path, const ProbMap& map) {
  write_planar(path, "mammopipe.probmap", map.width(), map.height(), static_cast<int>(kNumClasses),
               map.planar());
}

ProbMap read_prob_map(const std::filesystem::path& path) {
  MapHeader h{};
  auto data = read_planar(path, "mammopipe.probmap", h);
  if (h.channels != static_cast<int>(kNumClasses)) {
    throw IoError(path.string() + ": probability maps need 5 channels, found " + std::to_string(h.channels));
  }
  return ProbMap(h.width, h.height, std::move(data));
}

void write_float_map(const std::filesystem::path& path, const FloatImage& map) {
  std::vector<float> data(map.data().begin(), map.data().end());
  write_planar(path, "mammopipe.floatmap", map.width(), map.height(), 1, data);
}

FloatImage read_float_map(const std::filesystem::path& path) {
  MapHeader h{};
  const auto data = read_planar(path, "mammopipe.floatmap", h);
  if (h.channels != 1) throw IoError(path.string() + ": float maps have one channel");
  return FloatImage(h.width, h.height, std::vector<double>(data.begin(), data.end()));
}

std::string run_config_json(const RunConfig& c) {
  json j;
  j["format"] = "mammopipe.config";
  j["version"] = kFormatVersion;
  j["seed"] = c.seed;
  j["policy"] = policy_to_json(c.policy);
  j["clahe_clip_limit"] = c.clahe_clip_limit;
  j["low_percentile"] = c.low_percentile;
  j["high_percentile"] = c.high_percentile;
  j["alpha"] = c.alpha;
  j["tta_statistic"] = statistic_name(c.tta_statistic);
  j["output_dir"] = c.output_dir;
  return j.dump(2) + "\n";
}

RunConfig parse_run_config(const std::string& json_text, const std::string& source) {
  const json j = parse_json(json_text, source);
  if (!j.is_object()) throw IoError(source + ": config must be a JSON object");
  static const std::set<std::string> known{"format", "version", "seed", "policy",
                                           "clahe_clip_limit", "low_percentile", "high_percentile",
                                           "alpha", "tta_statistic", "output_dir"};
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) throw IoError(source + ": unknown config key '" + key + "'");
  }
  if (j.contains("version") && j["version"] != kFormatVersion) {
    throw IoError(source + ": unsupported config version " + j["version"].dump());
  }
  RunConfig c;
  try {
    c.seed = j.value("seed", c.seed);
    if (j.contains("policy")) c.policy = policy_from_json(j["policy"], source);
    c.clahe_clip_limit = j.value("clahe_clip_limit", c.clahe_clip_limit);
    c.low_percentile = j.value("low_percentile", c.low_percentile);
    c.high_percentile = j.value("high_percentile", c.high_percentile);
    c.alpha = j.value("alpha", c.alpha);
    if (j.contains("tta_statistic")) c.tta_statistic = parse_statistic(j["tta_statistic"].get<std::string>());
    c.output_dir = j.value("output_dir", c.output_dir);
  } catch (const IoError&) {
    throw;
  } catch (const std::exception& e) {
    throw IoError(source + ": " + e.what());
  }
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  return parse_run_config(read_text_file(path), path.string());
}

void save_run_config(const std::filesystem::path& path, const RunConfig& c) {
  write_text_file(path, run_config_json(c));
}

MixPolicy resolve_policy(const std::string& spec) {
  if (spec == "style25") return MixPolicy::style25();
  if (spec == "combo20") return MixPolicy::combo20();
  if (spec == "original") return MixPolicy::only(SourceCategory::original);
  const std::filesystem::path p(spec);
  if (!std::filesystem::exists(p)) {
    throw IoError("policy '" + spec + "' is neither style25, combo20, original nor an existing JSON file");
  }
  return policy_from_json(parse_json(read_text_file(p), spec), spec);
}

std::string outcome_json(const ManipulationOutcome& o, std::uint64_t seed, const std::string& sample_id) {
  json j;
  j["format"] = "mammopipe.augment";
  j["version"] = kFormatVersion;
  j["sample_id"] = sample_id;
  j["seed"] = seed;
  j["applied"] = o.applied;
  j["degraded"] = o.degraded;
  if (o.degraded) j["degraded_reason"] = o.degraded_reason;
  j["scale"] = o.scale;
  if (o.applied) {
    j["a_min"] = o.a_min;
    j["a_max"] = o.a_max;
    j["mu_nipple"] = o.mu_nipple;
    j["mu_fatty"] = o.mu_fatty;
    j["mu_fibroglandular"] = o.mu_fibroglandular;
    j["p_fatty"] = o.p_fatty;
    j["b"] = o.b;
  }
  j["background_zeroed"] = o.background_zeroed;
  j["label_added"] = o.label_added;
  if (o.stamp) {
    j["label"] = {{"text", o.stamp->text}, {"x", o.stamp->x}, {"y", o.stamp->y},
                  {"width", o.stamp->width}, {"height", o.stamp->height}};
  }
  return j.dump(2) + "\n";
}

}  // namespace mammopipe::io
