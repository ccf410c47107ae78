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
#include <stdexcept>
#include <vector>

#include "mammopipe/preprocess.hpp"
#include "mammopipe/style_proxy.hpp"
#include "mammopipe/types.hpp"
#include "mammopipe/uncertainty.hpp"

namespace mammopipe::io {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Decoded PNG samples, interleaved, widened to 16 bits. Palette images
/// keep their indices (no palette expansion).
struct PngPixels {
  int width = 0;
  int height = 0;
  int channels = 1;
  int bit_depth = 8;
  bool palette = false;
  std::vector<std::uint16_t> samples;
};

PngPixels read_png(const std::filesystem::path& path);

/// 8- or 16-bit grayscale PNG as raw intensities.
RawImage read_png_raw(const std::filesystem::path& path);
/// 8-bit grayscale (or palette index) PNG.
GrayImage read_png_gray(const std::filesystem::path& path);
/// Gray, gray+alpha, RGB or RGBA; alpha is dropped.
ColorImage read_png_color(const std::filesystem::path& path);
/// Label PNG with indices 0..4. Invalid indices raise IoError naming the file.
LabelMap read_png_labels(const std::filesystem::path& path);

void write_png_gray(const std::filesystem::path& path, const GrayImage& img);
void write_png_labels(const std::filesystem::path& path, const LabelMap& labels);
void write_png_rgb(const std::filesystem::path& path, const RgbImage& img);

}  // namespace mammopipe::io
