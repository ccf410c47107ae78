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

#include "mammopipe/io/png.hpp"

#include <png.h>

#include <csetjmp>
#include <cstdio>
#include <memory>
#include <string>

#include "mammopipe/io/atomic_file.hpp"

namespace mammopipe::io {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

[[noreturn]] void fail(const std::filesystem::path& path, const std::string& what) {
  throw IoError(path.string() + ": " + what);
}

void write_png(const std::filesystem::path& path, int width, int height, int color_type,
               const std::uint8_t* data, int channels) {
  AtomicFile out(path);
  FilePtr fp(std::fopen(out.temp_path().c_str(), "wb"));
  if (!fp) fail(path, "cannot open for writing");

  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    fail(path, "libpng init failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    fail(path, "libpng write error");
  }
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), 8,
               color_type, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  const std::size_t stride = static_cast<std::size_t>(width) * channels;
  for (int y = 0; y < height; ++y) {
    png_write_row(png, const_cast<png_bytep>(data + static_cast<std::size_t>(y) * stride));
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  fp.reset();
  out.commit();
}

}  // namespace

PngPixels read_png(const std::filesystem::path& path) {
  FilePtr fp(std::fopen(path.c_str(), "rb"));
  if (!fp) fail(path, "cannot open");
  unsigned char sig[8];
  if (std::fread(sig, 1, 8, fp.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0) fail(path, "not a PNG file");

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_read_struct(&png, &info, nullptr);
    fail(path, "libpng init failed");
  }
  PngPixels px;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    fail(path, "corrupt PNG");
  }
  png_init_io(png, fp.get());
  png_set_sig_bytes(png, 8);
  png_read_info(png, info);

  const int color = png_get_color_type(png, info);
  int depth = png_get_bit_depth(png, info);
  px.palette = color == PNG_COLOR_TYPE_PALETTE;
  if (depth < 8) {
    if (px.palette) {
      png_set_packing(png);
    } else {
      png_set_expand_gray_1_2_4_to_8(png);
    }
    depth = 8;
  }
  if (depth == 16) png_set_swap(png);  // host little-endian u16
  png_read_update_info(png, info);

  px.width = static_cast<int>(png_get_image_width(png, info));
  px.height = static_cast<int>(png_get_image_height(png, info));
  px.channels = png_get_channels(png, info);
  px.bit_depth = depth;
  const std::size_t rowbytes = png_get_rowbytes(png, info);
  std::vector<std::uint8_t> buf(rowbytes * static_cast<std::size_t>(px.height));
  std::vector<png_bytep> rows(static_cast<std::size_t>(px.height));
  for (int y = 0; y < px.height; ++y) rows[static_cast<std::size_t>(y)] = buf.data() + rowbytes * y;
  png_read_image(png, rows.data());
  png_destroy_read_struct(&png, &info, nullptr);

  const std::size_t n = static_cast<std::size_t>(px.width) * px.height * px.channels;
  px.samples.resize(n);
  if (depth == 16) {
    for (std::size_t i = 0; i < n; ++i) {
      px.samples[i] = static_cast<std::uint16_t>(buf[2 * i] | (buf[2 * i + 1] << 8));
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) px.samples[i] = buf[i];
  }
  return px;
}

RawImage read_png_raw(const std::filesystem::path& path) {
  const PngPixels px = read_png(path);
  if (px.channels != 1) fail(path, "expected a single-channel PNG, found " + std::to_string(px.channels));
  RawImage img(px.width, px.height, 0.0);
  for (std::size_t i = 0; i < img.size(); ++i) img[i] = px.samples[i];
  return img;
}

GrayImage read_png_gray(const std::filesystem::path& path) {
  const PngPixels px = read_png(path);
  if (px.channels != 1) fail(path, "expected a single-channel PNG, found " + std::to_string(px.channels));
  if (px.bit_depth != 8) fail(path, "expected 8-bit samples, found " + std::to_string(px.bit_depth));
  GrayImage img(px.width, px.height, 0);
  for (std::size_t i = 0; i < img.size(); ++i) img[i] = static_cast<std::uint8_t>(px.samples[i]);
  return img;
}

ColorImage read_png_color(const std::filesystem::path& path) {
  const PngPixels px = read_png(path);
  if (px.bit_depth != 8) fail(path, "expected 8-bit samples");
  if (px.palette) fail(path, "palette images are not supported as stylized input");
  const int keep = (px.channels == 2 || px.channels == 4) ? px.channels - 1 : px.channels;
  std::vector<std::uint8_t> data;
  data.reserve(static_cast<std::size_t>(px.width) * px.height * keep);
  for (std::size_t p = 0; p < static_cast<std::size_t>(px.width) * px.height; ++p) {
    for (int c = 0; c < keep; ++c) data.push_back(static_cast<std::uint8_t>(px.samples[p * px.channels + c]));
  }
  return ColorImage(px.width, px.height, keep, std::move(data));
}

LabelMap read_png_labels(const std::filesystem::path& path) {
  const PngPixels px = read_png(path);
  if (px.channels != 1 || px.bit_depth != 8) fail(path, "label maps must be 8-bit single-channel PNG");
  std::vector<std::uint8_t> raw(px.samples.begin(), px.samples.end());
  try {
    return LabelMap::from_indices(px.width, px.height, raw);
  } catch (const std::invalid_argument& e) {
    fail(path, e.what());
  }
}

void write_png_gray(const std::filesystem::path& path, const GrayImage& img) {
  write_png(path, img.width(), img.height(), PNG_COLOR_TYPE_GRAY, img.data().data(), 1);
}

void write_png_labels(const std::filesystem::path& path, const LabelMap& labels) {
  const auto raw = labels.to_indices();
  write_png(path, labels.width(), labels.height(), PNG_COLOR_TYPE_GRAY, raw.data(), 1);
}

void write_png_rgb(const std::filesystem::path& path, const RgbImage& img) {
  write_png(path, img.width, img.height, PNG_COLOR_TYPE_RGB, img.data.data(), 3);
}

}  // namespace mammopipe::io
