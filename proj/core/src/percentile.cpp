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

#include "mammopipe/percentile.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mammopipe {

double percentile_inplace(std::span<double> values, double q) {
  if (values.empty()) throw std::domain_error("percentile of an empty sample");
  if (!(q >= 0.0 && q <= 100.0)) throw std::invalid_argument("percentile q outside [0,100]");

  const double pos = q / 100.0 * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const double frac = pos - static_cast<double>(lo);

  auto nth = values.begin() + static_cast<std::ptrdiff_t>(lo);
  std::nth_element(values.begin(), nth, values.end());
  const double a = *nth;
  if (frac == 0.0 || lo + 1 >= values.size()) return a;
  // The next order statistic is the minimum of the upper partition.
  const double b = *std::min_element(nth + 1, values.end());
  return a + (b - a) * frac;
}

}  // namespace mammopipe
