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

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <random>

#include "mammopipe/percentile.hpp"
#include "mammopipe/preprocess.hpp"
#include "test_support.hpp"

using namespace mammopipe;

namespace {

RawImage ramp(int n) {
  RawImage r(n, 1, 0.0);
  for (int i = 0; i < n; ++i) r[i] = i;
  return r;
}

// Sorted-list percentile written out longhand.
double percentile_longhand(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double pos = q / 100.0 * (v.size() - 1);
  const auto k = static_cast<std::size_t>(std::floor(pos));
  if (k + 1 >= v.size()) return v.back();
  return v[k] + (pos - k) * (v[k + 1] - v[k]);
}

// Per-tile LUTs built pixel by pixel from the padded image, with the clip
// limit and uniform spill of the clipped mass applied to a plain array.
std::vector<ToneLut> clahe_luts_longhand(const GrayImage& img) {
  const int tw = (img.width() + 7) / 8, th = (img.height() + 7) / 8;
  const int px = tw * th;
  const int limit = std::max(1, static_cast<int>(0.01 * px));
  std::vector<ToneLut> out;
  for (int ty = 0; ty < 8; ++ty) {
    for (int tx = 0; tx < 8; ++tx) {
      std::array<long, 256> h{};
      for (int y = ty * th; y < (ty + 1) * th; ++y)
        for (int x = tx * tw; x < (tx + 1) * tw; ++x)
          ++h[img.at(std::min(x, img.width() - 1), std::min(y, img.height() - 1))];
      long excess = 0;
      for (auto& c : h)
        if (c > limit) excess += c - limit, c = limit;
      for (auto& c : h) c += excess / 256;
      long rest = excess % 256;
      const long step = rest > 0 ? std::max(256 / rest, 1L) : 1;
      for (long b = 0; b < 256 && rest > 0; b += step, --rest) ++h[b];
      ToneLut lut{};
      long cum = 0;
      for (int v = 0; v < 256; ++v) {
        cum += h[v];
        lut[v] = quantize_u8(cum * 255.0 / px);
      }
      out.push_back(lut);
    }
  }
  return out;
}

}  // namespace

TEST_CASE("percentile interpolates linearly between order statistics") {
  std::vector<double> v;
  for (int i = 0; i <= 100; ++i) v.push_back(i);
  CHECK(percentile(v, 5.0) == doctest::Approx(5.0).epsilon(1e-15));
  CHECK(percentile({3.0, 1.0, 2.0, 4.0}, 50.0) == doctest::Approx(2.5));
  CHECK(percentile({42.0}, 73.0) == 42.0);
  CHECK_THROWS_AS(percentile({}, 50.0), std::domain_error);
  CHECK_THROWS_AS(percentile({1.0}, 101.0), std::invalid_argument);
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> d(-50, 50);
  for (int t = 0; t < 50; ++t) {
    std::vector<double> s(1 + t * 3);
    for (auto& x : s) x = d(gen);
    for (double q : {0.0, 2.0, 37.5, 98.0, 100.0}) CHECK(percentile(s, q) == doctest::Approx(percentile_longhand(s, q)).epsilon(1e-14));
  }
}

TEST_CASE("percentile_normalize on a constant image is degenerate") {
  RawImage r(4, 4, 17.0);
  const auto res = percentile_normalize(r);
  CHECK(res.degenerate);
  for (double v : res.image.pixels()) CHECK(v == 0.0);
}

TEST_CASE("percentile_normalize on a 0..99 ramp") {
  const RawImage r = ramp(100);
  std::vector<double> vals(r.data());
  const double p2 = percentile_longhand(vals, 2.0), p98 = percentile_longhand(vals, 98.0);
  CHECK(p2 == doctest::Approx(1.98));
  CHECK(p98 == doctest::Approx(97.02));
  const auto res = percentile_normalize(r);
  CHECK_FALSE(res.degenerate);
  for (int v = 0; v < 100; ++v) {
    const double expect = std::clamp((v - p2) / (p98 - p2), 0.0, 1.0);
    CHECK(res.image[v] == doctest::Approx(expect).epsilon(1e-12));
  }
  CHECK(res.image[0] == 0.0);
  CHECK(res.image[1] == 0.0);
  CHECK(res.image[98] == 1.0);
  CHECK(res.image[99] == 1.0);
}

TEST_CASE("percentile_normalize is invariant under positive affine maps") {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> d(0, 4000);
  RawImage r(32, 24, 0.0);
  for (auto& v : r.pixels()) v = std::round(d(gen));
  const auto base = percentile_normalize(r);
  for (auto [a, b] : {std::pair{3.5, -200.0}, std::pair{0.001, 7.0}, std::pair{12.0, 1e5}}) {
    RawImage t = r;
    for (auto& v : t.pixels()) v = a * v + b;
    const auto res = percentile_normalize(t);
    for (std::size_t i = 0; i < r.size(); ++i) REQUIRE(std::abs(res.image[i] - base.image[i]) <= 1e-9);
  }
}

TEST_CASE("window bounds follow the floor formula") {
  const auto b = window_bounds(100, 40);
  CHECK(b.x_min == 70);
  CHECK(b.x_max == 120);
  const auto inv = inverted_window_bounds(100, 40);
  CHECK(inv.x_min == -130);
  CHECK(inv.x_max == -80);
  // odd width: floor(41/2)=20, floor(10.25)=10
  CHECK(window_bounds(100, 41).x_min == 70);
  CHECK(window_bounds(100, 41).x_max == 120);
  // floor of the product, not of w first: floor(0.25*43)=10
  CHECK(window_bounds(0, 43).x_min == -31);
}

TEST_CASE("window_rescale endpoints and clipping") {
  RawImage r(5, 1, 0.0);
  r[0] = 70; r[1] = 120; r[2] = 10; r[3] = 95; r[4] = 500;
  r.window_center = 100;
  r.window_width = 40;
  const RawImage out = window_rescale(r);
  CHECK(out[0] == 0.0);
  CHECK(out[1] == 1.0);
  CHECK(out[2] == 0.0);
  CHECK(out[3] == doctest::Approx(0.5));
  CHECK(out[4] == 1.0);

  RawImage missing(2, 2, 1.0);
  CHECK_THROWS_AS(window_rescale(missing), std::invalid_argument);
  missing.window_center = 3;
  missing.window_width = 0;
  CHECK_THROWS_AS(window_rescale(missing), std::invalid_argument);
}

TEST_CASE("invert_window_rescale maps 80 to max and 130 to min") {
  RawImage r(4, 1, 0.0);
  r[0] = 80; r[1] = 130; r[2] = 105; r[3] = 0;
  r.window_center = 100;
  r.window_width = 40;
  const RawImage out = invert_window_rescale(r);
  CHECK(out[0] == 1.0);
  CHECK(out[1] == 0.0);
  CHECK(out[2] == doctest::Approx(0.5));
  CHECK(out[3] == 1.0);
  CHECK_THROWS_AS(invert_window_rescale(RawImage(2, 2, 0.0)), std::invalid_argument);
}

TEST_CASE("clahe uses an 8x8 grid with ceil tiles") {
  const auto t = clahe_tiling(100, 61);
  CHECK(t.grid_x == 8);
  CHECK(t.grid_y == 8);
  CHECK(t.tile_w == 13);
  CHECK(t.tile_h == 8);
  CHECK(clahe_tile_mappings(GrayImage(100, 61, 9)).size() == 64);
  CHECK_THROWS_AS(clahe(GrayImage(7, 30)), std::invalid_argument);
  CHECK_THROWS_AS(clahe(GrayImage(30, 7)), std::invalid_argument);
}

TEST_CASE("clahe output range and determinism on random inputs") {
  std::mt19937_64 gen(5);
  for (auto [w, h] : {std::pair{64, 64}, std::pair{37, 53}, std::pair{8, 8}, std::pair{130, 90}}) {
    const GrayImage g = test::random_gray(gen, w, h);
    const GrayImage a = clahe(g), b = clahe(g);
    CHECK(a == b);
    CHECK(a.width() == w);
    CHECK(a.height() == h);
  }
}

TEST_CASE("clahe two-tone tile mappings match the longhand CDF") {
  GrayImage g(64, 64);
  for (int y = 0; y < 64; ++y)
    for (int x = 0; x < 64; ++x) g.at(x, y) = x < 32 ? 50 : 200;
  const auto luts = clahe_tile_mappings(g);
  const auto expect = clahe_luts_longhand(g);
  REQUIRE(luts.size() == 64);
  for (std::size_t i = 0; i < luts.size(); ++i) {
    CHECK(luts[i] == expect[i]);
    for (int v = 1; v < 256; ++v) CHECK(luts[i][v] >= luts[i][v - 1]);
    CHECK(luts[i][255] == 255);
  }
  // Hand count for a tile of 64 pixels at level 50: limit 1, 63 clipped
  // counts spread one each over bins 0,4,...,248.
  CHECK(luts[0][49] == 52);
  CHECK(luts[0][50] == 56);
}

TEST_CASE("clahe tile mappings match the longhand CDF on padded random images") {
  std::mt19937_64 gen(17);
  for (auto [w, h] : {std::pair{61, 45}, std::pair{96, 128}, std::pair{9, 17}}) {
    const GrayImage g = test::random_gray(gen, w, h);
    CHECK(clahe_tile_mappings(g) == clahe_luts_longhand(g));
  }
}

TEST_CASE("clahe on a constant image stays constant") {
  const GrayImage out = clahe(GrayImage(40, 40, 90));
  for (auto v : out.pixels()) CHECK(v == out[0]);
}

TEST_CASE("flip_if_left") {
  AnnotatedSample s;
  s.image = GrayImage(10, 2);
  s.labels = LabelMap(10, 2);
  for (int x = 0; x < 10; ++x) s.image.at(x, 1) = static_cast<std::uint8_t>(x * 10);
  s.labels.at(3, 0) = ClassId::nipple;
  s.laterality = Laterality::right;
  CHECK(flip_if_left(s).image == s.image);
  CHECK(flip_if_left(s).labels == s.labels);

  s.laterality = Laterality::left;
  const AnnotatedSample f = flip_if_left(s);
  CHECK(f.laterality == Laterality::right);
  CHECK(f.labels.at(6, 0) == ClassId::nipple);
  CHECK(f.labels.at(3, 0) == ClassId::background);
  CHECK(f.image.at(0, 1) == 90);
  CHECK(count_set(mask_of(f.labels, ClassId::nipple)) == 1);

  AnnotatedSample back = f;
  back.laterality = Laterality::left;
  const AnnotatedSample twice = flip_if_left(back);
  CHECK(twice.image == s.image);
  CHECK(twice.labels == s.labels);
}

TEST_CASE("vendor pipeline specs") {
  using S = PreprocessStep;
  const std::vector<S> base{S::percentile_normalize, S::clahe, S::rescale_0_255, S::flip_if_left};
  CHECK(PipelineSpec::for_vendor(Vendor::ge).steps == base);
  CHECK(PipelineSpec::for_vendor(Vendor::hologic).steps == base);
  auto ims = base;
  ims.insert(ims.begin(), S::window_rescale);
  CHECK(PipelineSpec::for_vendor(Vendor::ims).steps == ims);
  auto pm = base;
  pm.insert(pm.begin(), S::invert_window_rescale);
  CHECK(PipelineSpec::for_vendor(Vendor::planmed).steps == pm);
}

namespace {

RawImage synthetic_raw(std::uint64_t seed, int w, int h) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> noise(0, 40);
  RawImage r(w, h, 0.0);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const double dx = x - w * 0.2, dy = y - h * 0.5;
      r.at(x, y) = 600 + 2500 * std::exp(-(dx * dx + dy * dy) / (0.3 * w * w)) + noise(gen);
    }
  r.window_center = 1800;
  r.window_width = 2400;
  return r;
}

}  // namespace

TEST_CASE("pipeline on a constant raw image propagates the degenerate flag") {
  const auto res = run_pipeline(RawImage(16, 16, 5.0), PipelineSpec::for_vendor(Vendor::ge), {});
  CHECK(res.degenerate);
  for (auto v : res.sample.image.pixels()) CHECK(v == 0);
}

TEST_CASE("IMS pipeline equals window_rescale followed by the GE pipeline") {
  const RawImage raw = synthetic_raw(1, 48, 40);
  SampleInfo info;
  info.vendor = Vendor::ims;
  const auto ims = run_pipeline(raw, PipelineSpec::for_vendor(Vendor::ims), info);
  const auto ge = run_pipeline(window_rescale(raw), PipelineSpec::for_vendor(Vendor::ge), info);
  CHECK(ims.sample.image == ge.sample.image);
}

TEST_CASE("pipeline flips left samples together with their labels") {
  const RawImage raw = synthetic_raw(2, 40, 32);
  LabelMap labels(40, 32);
  labels.at(2, 5) = ClassId::nipple;
  SampleInfo info;
  info.laterality = Laterality::left;
  const auto left = run_pipeline(raw, PipelineSpec::for_vendor(Vendor::ge), info, labels);
  info.laterality = Laterality::right;
  const auto right = run_pipeline(raw, PipelineSpec::for_vendor(Vendor::ge), info, labels);
  CHECK(left.sample.laterality == Laterality::right);
  CHECK(left.sample.labels.at(37, 5) == ClassId::nipple);
  for (int y = 0; y < 32; ++y)
    for (int x = 0; x < 40; ++x) REQUIRE(left.sample.image.at(x, y) == right.sample.image.at(39 - x, y));
}

TEST_CASE("pipeline output matches the stored golden image") {
  const RawImage raw = synthetic_raw(42, 64, 48);
  SampleInfo info;
  info.vendor = Vendor::planmed;
  info.laterality = Laterality::left;
  const auto res = run_pipeline(raw, PipelineSpec::for_vendor(Vendor::planmed), info);
  const auto& px = res.sample.image.data();
  const std::string got(px.begin(), px.end());
  const auto golden = test::data_dir() / "golden_pipeline_planmed_64x48.bin";
  if (std::getenv("MAMMOPIPE_UPDATE_GOLDEN")) {
    std::ofstream(golden, std::ios::binary) << got;
  }
  REQUIRE(std::filesystem::exists(golden));
  CHECK(test::slurp(golden) == got);
  CHECK(res.sample.image.width() == 64);
}
