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

// Synthetic mammogram-like samples on disk: raw uint16 binaries with JSON
// sidecars, label PNGs and a sample manifest. Everything is derived from a
// seed so two calls with the same arguments write identical bytes.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "mammopipe/io/formats.hpp"
#include "mammopipe/io/manifest.hpp"
#include "mammopipe/io/png.hpp"
#include "mammopipe/types.hpp"

namespace mammopipe::test {

inline LabelMap synthetic_anatomy(std::mt19937_64& gen, int w, int h) {
  std::uniform_real_distribution<double> jitter(-0.06, 0.06);
  const double rx = (0.82 + jitter(gen)) * w, ry = (0.48 + jitter(gen)) * h;
  const double cy = h / 2.0 + jitter(gen) * h;
  const double pect = (0.32 + jitter(gen)) * w;
  const double fx = (0.38 + jitter(gen)) * w, fy = cy + jitter(gen) * h, fr = (0.17 + jitter(gen) / 2) * w;
  const double nx = rx - 4.5, nr = 3.0;

  LabelMap m(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double px = x + 0.5, py = y + 0.5;
      const double e = (px / rx) * (px / rx) + ((py - cy) / ry) * ((py - cy) / ry);
      ClassId c = ClassId::background;
      if (e < 1.0) {
        c = ClassId::fatty;
        if (std::hypot(px - fx, py - fy) < fr) c = ClassId::fibroglandular;
        if (px + py < pect) c = ClassId::pectoral;
        if (std::hypot(px - nx, py - cy) < nr) c = ClassId::nipple;
      }
      m.at(x, y) = c;
    }
  }
  return m;
}

inline std::vector<std::uint16_t> synthetic_raw(std::mt19937_64& gen, const LabelMap& labels) {
  std::normal_distribution<double> noise(0.0, 90.0);
  std::vector<std::uint16_t> raw(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    double base = 60.0;
    switch (labels[i]) {
      case ClassId::nipple: base = 2300.0; break;
      case ClassId::pectoral: base = 3100.0; break;
      case ClassId::fibroglandular: base = 2700.0; break;
      case ClassId::fatty: base = 1500.0; break;
      case ClassId::background: break;
    }
    raw[i] = static_cast<std::uint16_t>(std::clamp(std::lround(base + noise(gen)), 0L, 65535L));
  }
  return raw;
}

/// Writes `n` samples under dir/raw and returns the manifest path. Vendors
/// cycle GE, IMS, PLANMED, HOLOGIC; laterality alternates.
inline std::filesystem::path write_synthetic_dataset(const std::filesystem::path& dir, int n, std::uint64_t seed,
                                                     int width = 96, int height = 80) {
  namespace fs = std::filesystem;
  const fs::path raw_dir = dir / "raw";
  fs::create_directories(raw_dir);
  const Vendor vendors[] = {Vendor::ge, Vendor::ims, Vendor::planmed, Vendor::hologic};

  std::vector<io::ManifestRow> rows;
  for (int i = 0; i < n; ++i) {
    std::mt19937_64 gen(seed * 1000003u + static_cast<std::uint64_t>(i));
    const std::string id = fmt::format("s{:03d}", i);
    const LabelMap labels = synthetic_anatomy(gen, width, height);
    const auto raw = synthetic_raw(gen, labels);

    const fs::path bin = raw_dir / (id + ".raw");
    {
      std::ofstream out(bin, std::ios::binary);
      for (std::uint16_t v : raw) {
        const char bytes[2] = {static_cast<char>(v & 0xff), static_cast<char>(v >> 8)};
        out.write(bytes, 2);
      }
    }
    io::Sidecar side;
    side.width = width;
    side.height = height;
    side.dtype = "uint16";
    side.window_center = 2000.0;
    side.window_width = 2400.0;
    io::write_sidecar(raw_dir / (id + ".json"), side);
    io::write_png_labels(raw_dir / (id + "_labels.png"), labels);

    io::ManifestRow r;
    r.id = id;
    r.image = bin;
    r.labels = raw_dir / (id + "_labels.png");
    r.vendor = vendors[i % 4];
    r.laterality = i % 2 ? Laterality::left : Laterality::right;
    r.view = i % 3 ? View::mlo : View::cc;
    r.spacing_m = 1e-4 * (1.0 + 0.05 * (i % 5));
    rows.push_back(r);
  }
  const fs::path manifest = dir / "manifest.csv";
  io::write_manifest(manifest, rows);
  return manifest;
}

/// Degraded copies of the manifest's label maps, written as pred_dir/<id>.png.
/// `noise` is the per-pixel chance of taking a neighbour's class.
inline void write_noisy_predictions(const std::filesystem::path& manifest, const std::filesystem::path& pred_dir,
                                    double noise, std::uint64_t seed) {
  std::filesystem::create_directories(pred_dir);
  const auto rows = io::read_manifest(manifest);
  for (std::size_t k = 0; k < rows.size(); ++k) {
    std::mt19937_64 gen(seed * 7919u + k);
    std::bernoulli_distribution flip(noise);
    std::uniform_int_distribution<int> dir(0, 3);
    const LabelMap gt = io::read_png_labels(rows[k].labels);
    LabelMap pred = gt;
    const int w = gt.width(), h = gt.height();
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        if (!flip(gen)) continue;
        static constexpr int dx[] = {1, -1, 0, 0}, dy[] = {0, 0, 1, -1};
        const int d = dir(gen);
        const int sx = std::clamp(x + 2 * dx[d], 0, w - 1), sy = std::clamp(y + 2 * dy[d], 0, h - 1);
        pred.at(x, y) = gt.at(sx, sy);
      }
    }
    io::write_png_labels(pred_dir / (rows[k].id + ".png"), pred);
  }
}

}  // namespace mammopipe::test
