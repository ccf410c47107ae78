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

#include "mammopipe/types.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

namespace mammopipe {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

}  // namespace

std::string_view class_name(ClassId c) {
  switch (c) {
    case ClassId::background: return "background";
    case ClassId::nipple: return "nipple";
    case ClassId::pectoral: return "pectoral";
    case ClassId::fibroglandular: return "fibroglandular";
    case ClassId::fatty: return "fatty";
  }
  return "unknown";
}

ClassId class_from_name(std::string_view name) {
  const std::string n = lower(name);
  for (ClassId c : kAllClasses) {
    if (class_name(c) == n) return c;
  }
  throw std::invalid_argument("unknown class name '" + std::string(name) + "'");
}

ClassId class_from_index(int v) {
  if (v < 0 || v >= static_cast<int>(kNumClasses)) {
    throw std::invalid_argument("class index " + std::to_string(v) + " out of range 0..4");
  }
  return static_cast<ClassId>(v);
}

std::string_view to_string(Vendor v) {
  switch (v) {
    case Vendor::ge: return "GE";
    case Vendor::ims: return "IMS";
    case Vendor::planmed: return "PLANMED";
    case Vendor::hologic: return "HOLOGIC";
    case Vendor::other: return "OTHER";
  }
  return "OTHER";
}

std::string_view to_string(Laterality l) {
  return l == Laterality::left ? "left" : "right";
}

std::string_view to_string(View v) { return v == View::mlo ? "MLO" : "CC"; }

Vendor parse_vendor(std::string_view s) {
  const std::string n = lower(s);
  if (n == "ge") return Vendor::ge;
  if (n == "ims") return Vendor::ims;
  if (n == "planmed") return Vendor::planmed;
  if (n == "hologic") return Vendor::hologic;
  if (n == "other") return Vendor::other;
  throw std::invalid_argument("unknown vendor '" + std::string(s) + "'");
}

Laterality parse_laterality(std::string_view s) {
  const std::string n = lower(s);
  if (n == "left" || n == "l") return Laterality::left;
  if (n == "right" || n == "r") return Laterality::right;
  throw std::invalid_argument("unknown laterality '" + std::string(s) + "'");
}

View parse_view(std::string_view s) {
  const std::string n = lower(s);
  if (n == "mlo") return View::mlo;
  if (n == "cc") return View::cc;
  throw std::invalid_argument("unknown view '" + std::string(s) + "'");
}

LabelMap LabelMap::from_indices(int width, int height, std::span<const std::uint8_t> raw) {
  if (raw.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    throw std::invalid_argument("label data length does not match width*height");
  }
  std::vector<ClassId> data(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (!is_valid_class(raw[i])) {
      throw std::invalid_argument("invalid class index " + std::to_string(raw[i]) +
                                  " at pixel " + std::to_string(i));
    }
    data[i] = static_cast<ClassId>(raw[i]);
  }
  return LabelMap(width, height, std::move(data));
}

std::vector<std::uint8_t> LabelMap::to_indices() const {
  std::vector<std::uint8_t> out(size());
  for (std::size_t i = 0; i < size(); ++i) out[i] = static_cast<std::uint8_t>((*this)[i]);
  return out;
}

void AnnotatedSample::validate() const {
  if (!image.same_shape(labels)) {
    throw std::invalid_argument("image and label map dimensions differ");
  }
}

BinaryMask mask_of(const LabelMap& labels, ClassId cls) {
  BinaryMask m(labels.width(), labels.height(), 0);
  for (std::size_t i = 0; i < labels.size(); ++i) m[i] = labels[i] == cls ? 1 : 0;
  return m;
}

std::size_t count_set(const BinaryMask& mask) {
  return static_cast<std::size_t>(
      std::count_if(mask.data().begin(), mask.data().end(), [](auto v) { return v != 0; }));
}

FloatImage to_unit_float(const GrayImage& img) {
  FloatImage out(img.width(), img.height(), 0.0);
  for (std::size_t i = 0; i < img.size(); ++i) out[i] = img[i] / 255.0;
  return out;
}

std::uint8_t quantize_u8(double v) {
  if (!(v > 0.0)) return 0;  // also maps NaN to 0
  if (v >= 255.0) return 255;
  return static_cast<std::uint8_t>(std::round(v));
}

}  // namespace mammopipe
