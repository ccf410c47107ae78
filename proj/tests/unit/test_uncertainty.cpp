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
#include <random>

#include "mammopipe/uncertainty.hpp"
#include "test_support.hpp"

using namespace mammopipe;

namespace {

ProbMap random_prob(std::mt19937_64& gen, int w, int h) {
  std::gamma_distribution<double> g(0.7, 1.0);
  ProbMap p(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      std::array<double, kNumClasses> v{};
      double s = 0;
      for (auto& e : v) s += e = g(gen) + 1e-9;
      for (std::size_t c = 0; c < kNumClasses; ++c) p.at(x, y, c) = static_cast<float>(v[c] / s);
    }
  return p;
}

ProbMap uniform(int w, int h) {
  ProbMap p(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (std::size_t c = 0; c < kNumClasses; ++c) p.at(x, y, c) = 0.2f;
  return p;
}

}  // namespace

TEST_CASE("prob map validation and one-hot") {
  LabelMap l(3, 2);
  l.at(1, 1) = ClassId::fatty;
  const ProbMap oh = ProbMap::one_hot(l);
  CHECK(oh.at(1, 1, 4) == 1.0f);
  CHECK(oh.at(0, 0, 0) == 1.0f);
  CHECK_NOTHROW(oh.validate());
  ProbMap bad = oh;
  bad.at(0, 0, 1) = 0.5f;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  CHECK_THROWS_AS(ProbMap(2, 2, std::vector<float>(19)), std::invalid_argument);
}

TEST_CASE("align") {
  std::mt19937_64 gen(1);
  const ProbMap p = random_prob(gen, 7, 5);
  CHECK(align(p, TtaTransform::parse("identity")) == p);
  CHECK(align(p, TtaTransform::parse("intensity_shift(0.1)")) == p);
  const TtaTransform h = TtaTransform::parse("hflip");
  const TtaTransform v = TtaTransform::parse("vflip");
  CHECK(align(align(p, h), h) == p);
  CHECK(align(align(p, v), v) == p);
  const ProbMap f = align(p, h);
  for (int y = 0; y < 5; ++y)
    for (int x = 0; x < 7; ++x)
      for (std::size_t c = 0; c < kNumClasses; ++c) REQUIRE(f.at(x, y, c) == p.at(6 - x, y, c));
  const ProbMap g = align(p, v);
  CHECK(g.at(2, 0, 3) == p.at(2, 4, 3));
}

TEST_CASE("transform tags") {
  CHECK(TtaTransform::parse("intensity_shift(-0.25)").delta == -0.25);
  CHECK(TtaTransform::parse("intensity_shift(-0.25)").tag() == "intensity_shift(-0.25)");
  CHECK(TtaTransform::parse("hflip").tag() == "hflip");
  CHECK_THROWS_AS(TtaTransform::parse("rotate90"), std::invalid_argument);
  CHECK_THROWS_AS(TtaTransform::parse("intensity_shift(x)"), std::invalid_argument);
}

TEST_CASE("entropy bounds") {
  LabelMap l(6, 4);
  l.at(2, 2) = ClassId::pectoral;
  const std::vector<ProbMap> agree{ProbMap::one_hot(l), ProbMap::one_hot(l), ProbMap::one_hot(l)};
  {
    const auto res1 = uncertainty_map(agree);
    for (double u : res1.pixels()) CHECK(u == 0.0);
  }

  const std::vector<ProbMap> flat{uniform(6, 4)};
  {
    const auto res2 = uncertainty_map(flat);
    for (double u : res2.pixels()) CHECK(std::abs(u - 1.0) <= 1e-9);
  }

  const std::vector<ProbMap> split{ProbMap::one_hot(LabelMap(6, 4, ClassId::nipple)),
                                   ProbMap::one_hot(LabelMap(6, 4, ClassId::fatty))};
  {
    const auto res3 = uncertainty_map(split);
    for (double u : res3.pixels()) CHECK(std::abs(u - std::log(2.0) / std::log(5.0)) <= 1e-9);
  }
  CHECK(std::abs(std::log(2.0) / std::log(5.0) - 0.4307) < 1e-4);
}

TEST_CASE("uncertainty preconditions") {
  CHECK_THROWS_AS(uncertainty_map(std::vector<ProbMap>{}), std::invalid_argument);
  const std::vector<ProbMap> mixed{uniform(3, 3), uniform(3, 4)};
  CHECK_THROWS_AS(uncertainty_map(mixed), std::invalid_argument);
}

TEST_CASE("uncertainty range, permutation invariance and duplicates") {
  std::mt19937_64 gen(2);
  for (int t = 0; t < 20; ++t) {
    std::vector<ProbMap> stack;
    for (int k = 0; k < 4; ++k) stack.push_back(random_prob(gen, 5, 5));
    for (auto stat : {UncertaintyStatistic::normalized_entropy, UncertaintyStatistic::max_prob_std}) {
      const FloatImage u = uncertainty_map(stack, stat);
      for (double v : u.pixels()) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
      }
      auto perm = stack;
      std::shuffle(perm.begin(), perm.end(), gen);
      const FloatImage w = uncertainty_map(perm, stat);
      for (std::size_t i = 0; i < u.size(); ++i) CHECK(std::abs(u[i] - w[i]) <= 1e-12);
    }
    // Doubling every map leaves the mean and thus the entropy unchanged.
    auto doubled = stack;
    doubled.insert(doubled.end(), stack.begin(), stack.end());
    const FloatImage a = uncertainty_map(stack), b = uncertainty_map(doubled);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i] - b[i]) <= 1e-12);
  }
}

TEST_CASE("max-prob spread statistic") {
  CHECK(parse_statistic("maxprob-std") == UncertaintyStatistic::max_prob_std);
  CHECK(parse_statistic("entropy") == UncertaintyStatistic::normalized_entropy);
  CHECK_THROWS(parse_statistic("variance"));
  // max prob 1 and 0.2: population std 0.4, scaled by 2
  const std::vector<ProbMap> m{ProbMap::one_hot(LabelMap(2, 2)), uniform(2, 2)};
  {
    const auto res4 = uncertainty_map(m, UncertaintyStatistic::max_prob_std);
    for (double u : res4.pixels()) CHECK(u == doctest::Approx(0.8));
  }
}

TEST_CASE("hot colormap") {
  CHECK(hot_color(0.0) == std::array<std::uint8_t, 3>{0, 0, 0});
  CHECK(hot_color(1.0) == std::array<std::uint8_t, 3>{255, 255, 255});
  double prev = -1;
  std::array<std::uint8_t, 3> last{0, 0, 0};
  for (int i = 0; i < 256; ++i) {
    const auto c = hot_color(i / 255.0);
    for (int k = 0; k < 3; ++k) CHECK(c[k] >= last[k]);
    const double lum = 0.2126 * c[0] + 0.7152 * c[1] + 0.0722 * c[2];
    CHECK(lum >= prev);
    prev = lum;
    last = c;
  }
  FloatImage u(3, 1, 0.0);
  u[0] = -0.5;
  u[1] = 0.5;
  u[2] = 1.5;
  std::size_t clipped = 0;
  const RgbImage img = render_hot(u, &clipped);
  CHECK(clipped == 2);
  CHECK(img.data.size() == 9);
  CHECK(img.data[0] == 0);
  CHECK(img.data[6] == 255);
  CHECK(img.data[8] == 255);
}
