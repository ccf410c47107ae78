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
#include <string_view>
#include <vector>

namespace mammopipe {

/// Source of real-valued uniform draws. Algorithms take this interface so a
/// recorded transcript can be replayed in place of a live generator.
class RandomSource {
 public:
  virtual ~RandomSource() = default;
  /// A draw in [lo, hi). Callers guarantee lo <= hi.
  virtual double uniform(double lo, double hi) = 0;
};

/// Counter-based generator: draw n of a stream is SplitMix64's output
/// function applied to key + (n+1)*0x9E3779B97F4A7C15, so any draw can be
/// computed without replaying the ones before it.
///
/// Per-sample streams use key = mix(seed ^ fnv1a64(sample_id)); the stream
/// of a sample never depends on which other samples were processed or in
/// what order.
class SeededRng final : public RandomSource {
 public:
  explicit SeededRng(std::uint64_t seed);

  static SeededRng for_sample(std::uint64_t seed, std::string_view sample_id);
  static SeededRng for_index(std::uint64_t seed, std::uint64_t index);

  std::uint64_t next_u64();
  /// 53-bit uniform in [0,1).
  double next_unit();
  double uniform(double lo, double hi) override;

  std::uint64_t key() const { return key_; }
  std::uint64_t counter() const { return counter_; }

 private:
  SeededRng(std::uint64_t key, bool) : key_(key) {}

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Uniform real in [lo, hi); lo == hi returns lo. Throws
/// std::invalid_argument when lo > hi.
double rand_uniform(RandomSource& rng, double lo, double hi);

/// Replays a fixed list of draw values, one per uniform() call. Throws
/// std::out_of_range when the transcript is exhausted and
/// std::domain_error if a scripted value falls outside [lo, hi].
class ReplaySource final : public RandomSource {
 public:
  explicit ReplaySource(std::vector<double> values) : values_(std::move(values)) {}
  double uniform(double lo, double hi) override;
  std::size_t consumed() const { return pos_; }

 private:
  std::vector<double> values_;
  std::size_t pos_ = 0;
};

/// Forwards to another source and keeps every value it returned.
class RecordingSource final : public RandomSource {
 public:
  explicit RecordingSource(RandomSource& inner) : inner_(inner) {}
  double uniform(double lo, double hi) override;
  const std::vector<double>& transcript() const { return transcript_; }

 private:
  RandomSource& inner_;
  std::vector<double> transcript_;
};

std::uint64_t splitmix64_mix(std::uint64_t z);
std::uint64_t fnv1a64(std::string_view s);

}  // namespace mammopipe
