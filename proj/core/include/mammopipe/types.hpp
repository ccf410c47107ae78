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

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mammopipe {

// Class indices are part of every file format; do not renumber.
enum class ClassId : std::uint8_t {
  background = 0,
  nipple = 1,
  pectoral = 2,
  fibroglandular = 3,
  fatty = 4,
};

inline constexpr std::size_t kNumClasses = 5;

inline constexpr std::array<ClassId, kNumClasses> kAllClasses = {
    ClassId::background, ClassId::nipple, ClassId::pectoral,
    ClassId::fibroglandular, ClassId::fatty};

/// Structures reported in result tables, in table column order.
inline constexpr std::array<ClassId, 4> kForegroundClasses = {
    ClassId::nipple, ClassId::pectoral, ClassId::fibroglandular,
    ClassId::fatty};

constexpr std::size_t index_of(ClassId c) { return static_cast<std::size_t>(c); }

constexpr bool is_valid_class(std::uint8_t v) { return v < kNumClasses; }

std::string_view class_name(ClassId c);
ClassId class_from_name(std::string_view name);
ClassId class_from_index(int v);

enum class Vendor { ge, ims, planmed, hologic, other };
enum class Laterality { left, right };
enum class View { mlo, cc };

std::string_view to_string(Vendor v);
std::string_view to_string(Laterality l);
std::string_view to_string(View v);
Vendor parse_vendor(std::string_view s);
Laterality parse_laterality(std::string_view s);
View parse_view(std::string_view s);

/// Dense row-major 2-D grid. All image-like types are built on this.
template <typename T>
class Grid {
 public:
  using value_type = T;

  Grid() = default;
  Grid(int width, int height, T fill = T{})
      : width_(width), height_(height),
        data_(checked_area(width, height), fill) {}
  Grid(int width, int height, std::vector<T> data)
      : width_(width), height_(height), data_(std::move(data)) {
    if (data_.size() != checked_area(width, height)) {
      throw std::invalid_argument("grid data length does not match width*height");
    }
  }

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  T& at(int x, int y) { return data_[static_cast<std::size_t>(y) * width_ + x]; }
  const T& at(int x, int y) const {
    return data_[static_cast<std::size_t>(y) * width_ + x];
  }
  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }

  std::span<T> pixels() { return data_; }
  std::span<const T> pixels() const { return data_; }
  const std::vector<T>& data() const { return data_; }

  bool same_shape(int w, int h) const { return w == width_ && h == height_; }
  template <typename U>
  bool same_shape(const Grid<U>& other) const {
    return other.width() == width_ && other.height() == height_;
  }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  static std::size_t checked_area(int w, int h) {
    if (w < 0 || h < 0) throw std::invalid_argument("negative grid dimension");
    return static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

/// 8-bit single-channel image with optional isotropic spacing in meters/pixel.
struct GrayImage : Grid<std::uint8_t> {
  using Grid::Grid;
  std::optional<double> spacing_m;

  friend bool operator==(const GrayImage&, const GrayImage&) = default;
};

/// Real-valued single-channel image. Used for intermediate intensities and
/// for the [0,1] model-input export.
using FloatImage = Grid<double>;

using BinaryMask = Grid<std::uint8_t>;  // 0 or 1

class LabelMap : public Grid<ClassId> {
 public:
  using Grid::Grid;
  LabelMap(int width, int height) : Grid(width, height, ClassId::background) {}

  /// Validates raw bytes against the class taxonomy.
  static LabelMap from_indices(int width, int height, std::span<const std::uint8_t> raw);
  std::vector<std::uint8_t> to_indices() const;
};

struct AnnotatedSample {
  GrayImage image;
  LabelMap labels;
  Vendor vendor = Vendor::other;
  Laterality laterality = Laterality::right;
  View view = View::mlo;

  void validate() const;
};

/// True exactly where labels == cls.
BinaryMask mask_of(const LabelMap& labels, ClassId cls);

std::size_t count_set(const BinaryMask& mask);

/// v/255 for every pixel.
FloatImage to_unit_float(const GrayImage& img);

/// Round half away from zero, then clip to [0,255].
std::uint8_t quantize_u8(double v);

}  // namespace mammopipe
