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

#include "mammopipe/rng.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace mammopipe {

namespace {
constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;
}

std::uint64_t splitmix64_mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

SeededRng::SeededRng(std::uint64_t seed) : key_(seed) {}

SeededRng SeededRng::for_sample(std::uint64_t seed, std::string_view sample_id) {
  return SeededRng(splitmix64_mix(seed ^ fnv1a64(sample_id)), true);
}

SeededRng SeededRng::for_index(std::uint64_t seed, std::uint64_t index) {
  return SeededRng(splitmix64_mix(seed ^ splitmix64_mix(index + kGamma)), true);
}

std::uint64_t SeededRng::next_u64() {
  ++counter_;
  return splitmix64_mix(key_ + counter_ * kGamma);
}

double SeededRng::next_unit() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double SeededRng::uniform(double lo, double hi) {
  const double u = next_unit();
  double r = lo + (hi - lo) * u;
  // lo + (hi-lo)*u can round up to hi.
  if (r >= hi && hi > lo) r = std::nextafter(hi, lo);
  return r;
}

double rand_uniform(RandomSource& rng, double lo, double hi) {
  if (!(lo <= hi)) {
    throw std::invalid_argument("rand_uniform: lo > hi");
  }
  if (lo == hi) return lo;
  return rng.uniform(lo, hi);
}

double ReplaySource::uniform(double lo, double hi) {
  if (pos_ >= values_.size()) {
    throw std::out_of_range("replay transcript exhausted after " +
                            std::to_string(pos_) + " draws");
  }
  const double v = values_[pos_++];
  if (v < lo || v > hi) {
    throw std::domain_error("replayed draw " + std::to_string(v) +
                            " outside [" + std::to_string(lo) + ", " +
                            std::to_string(hi) + "]");
  }
  return v;
}

double RecordingSource::uniform(double lo, double hi) {
  const double v = inner_.uniform(lo, hi);
  transcript_.push_back(v);
  return v;
}

}  // namespace mammopipe
