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

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "mammopipe/augment.hpp"
#include "mammopipe/metrics.hpp"
#include "mammopipe/preprocess.hpp"
#include "mammopipe/stats.hpp"

using namespace mammopipe;

namespace {

GrayImage noise_image(int w, int h, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_int_distribution<int> v(0, 255);
  GrayImage g(w, h);
  for (auto& px : g.pixels()) px = static_cast<std::uint8_t>(v(gen));
  return g;
}

// Concentric bands, roughly the layout of a breast label map.
LabelMap banded_labels(int n, int shift) {
  LabelMap m(n, n);
  for (int y = 0; y < n; ++y) {
    for (int x = 0; x < n; ++x) {
      const int r = (x + shift) * (x + shift) + (y - n / 2) * (y - n / 2);
      const int band = r / (n * n / 10);
      m.at(x, y) = band > 4 ? ClassId::background : static_cast<ClassId>(1 + band % 4);
    }
  }
  return m;
}

}  // namespace

static void BM_Clahe(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const GrayImage img = noise_image(n, n, 1);
  for (auto _ : state) benchmark::DoNotOptimize(clahe(img));
  state.SetItemsProcessed(state.iterations() * n * n);
}
BENCHMARK(BM_Clahe)->Arg(384)->Arg(1024);

static void BM_VendorPipeline(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::mt19937_64 gen(2);
  std::uniform_real_distribution<double> v(0, 4095);
  RawImage raw(n, n);
  for (auto& px : raw.pixels()) px = v(gen);
  raw.window_center = 2000;
  raw.window_width = 2400;
  const PipelineSpec spec = PipelineSpec::for_vendor(Vendor::planmed);
  SampleInfo info;
  info.laterality = Laterality::left;
  for (auto _ : state) benchmark::DoNotOptimize(run_pipeline(raw, spec, info, std::nullopt));
}
BENCHMARK(BM_VendorPipeline)->Arg(384)->Arg(1024);

static void BM_EvaluatePair(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const LabelMap gt = banded_labels(n, 0), pred = banded_labels(n, 3);
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_pair("b", pred, gt, 1e-4));
}
BENCHMARK(BM_EvaluatePair)->Arg(384)->Arg(1024);

static void BM_HausdorffAvg(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto a = extract_contour(banded_labels(n, 0), ClassId::fibroglandular);
  const auto b = extract_contour(banded_labels(n, 5), ClassId::fibroglandular);
  for (auto _ : state) benchmark::DoNotOptimize(hausdorff_avg(a, b, 1e-4));
}
BENCHMARK(BM_HausdorffAvg)->Arg(384)->Arg(1024);

static void BM_KruskalDunn(benchmark::State& state) {
  const auto per_group = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 gen(3);
  std::normal_distribution<double> d(0.7, 0.1);
  std::vector<stats::Population> groups;
  for (int g = 0; g < 4; ++g) {
    stats::Population p{"m" + std::to_string(g), {}};
    for (std::size_t i = 0; i < per_group; ++i) p.values.push_back(std::round(d(gen) * 1e4) / 1e4 + 0.01 * g);
    groups.push_back(std::move(p));
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(stats::kruskal_wallis(groups));
    benchmark::DoNotOptimize(stats::dunn_bonferroni(groups, 0.05));
  }
}
BENCHMARK(BM_KruskalDunn)->Arg(100)->Arg(10000);

static void BM_Manipulate(benchmark::State& state) {
  const GrayImage img = noise_image(384, 384, 4);
  const ManipulationMasks masks = ManipulationMasks::from_labels(banded_labels(384, 0));
  std::uint64_t i = 0;
  for (auto _ : state) {
    SeededRng rng = SeededRng::for_index(7, i++);
    benchmark::DoNotOptimize(manipulate(img, masks, rng));
  }
}
BENCHMARK(BM_Manipulate);

BENCHMARK_MAIN();
