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

#include <span>
#include <vector>

namespace mammopipe {

/// q-th percentile (0..100) with linear interpolation between order
/// statistics: position q/100*(n-1) in the sorted sample. Reorders `values`.
/// Throws std::domain_error on an empty sample and std::invalid_argument
/// when q is outside [0,100].
double percentile_inplace(std::span<double> values, double q);

inline double percentile(std::vector<double> values, double q) {
  return percentile_inplace(values, q);
}

}  // namespace mammopipe
