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

#include "mammopipe/uncertainty.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <stdexcept>
#include <string>

namespace mammopipe {

ProbMap::ProbMap(int width, int height)
    : width_(width), height_(height),
      data_(kNumClasses * static_cast<std::size_t>(width) * static_cast<std::size_t>(height), 0.0f) {
  if (width < 0 || height < 0) throw std::invalid_argument("negative probability map size");
}

ProbMap::ProbMap(int width, int height, std::vector<float> planar)
    : width_(width), height_(height), data_(std::move(planar)) {
  if (width < 0 || height < 0) throw std::invalid_argument("negative probability map size");
  if (data_.size() != kNumClasses * pixels()) {
    throw std::invalid_argument("probability map data length does not match 5 x width x height");
  }
}

void ProbMap::validate(double tol) const {
  for (int y = 0; y < height_; ++y) {
    for (int x = 0; x < width_; ++x) {
      double sum = 0.0;
      for (std::size_t c = 0; c < kNumClasses; ++c) {
        const float v = at(x, y, c);
        if (!(v >= 0.0f)) {
          throw std::invalid_argument("negative probability at (" + std::to_string(x) + "," +
                                      std::to_string(y) + ")");
        }
        sum += v;
      }
      if (std::abs(sum - 1.0) > tol) {
        throw std::invalid_argument("probabilities at (" + std::to_string(x) + "," + std::to_string(y) +
                                    ") sum to " + std::to_string(sum));
      }
    }
  }
}

ProbMap ProbMap::one_hot(const LabelMap& labels) {
  ProbMap p(labels.width(), labels.height());
  for (int y = 0; y < labels.height(); ++y) {
    for (int x = 0; x < labels.width(); ++x) p.at(x, y, index_of(labels.at(x, y))) = 1.0f;
  }
  return p;
}

TtaTransform TtaTransform::parse(std::string_view tag) {
  if (tag == "identity") return {TtaKind::identity, 0.0};
  if (tag == "hflip") return {TtaKind::hflip, 0.0};
  if (tag == "vflip") return {TtaKind::vflip, 0.0};
  constexpr std::string_view prefix = "intensity_shift(";
  if (tag.starts_with(prefix) && tag.ends_with(")")) {
    const auto body = tag.substr(prefix.size(), tag.size() - prefix.size() - 1);
    double delta = 0.0;
    const auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), delta);
    if (ec == std::errc() && ptr == body.data() + body.size()) return {TtaKind::intensity_shift, delta};
  }
  throw std::invalid_argument("unknown TTA transform '" + std::string(tag) + "'");
}

std::string TtaTransform::tag() const {
  switch (kind) {
    case TtaKind::identity: return "identity";
    case TtaKind::hflip: return "hflip";
    case TtaKind::vflip: return "vflip";
    case TtaKind::intensity_shift: {
      char buf[64];
      const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, delta);
      return "intensity_shift(" + std::string(buf, ptr) + ")";
    }
  }
  return "identity";
}

ProbMap align(const ProbMap& prob, const TtaTransform& t) {
  if (t.kind == TtaKind::identity || t.kind == TtaKind::intensity_shift) return prob;
  ProbMap out(prob.width(), prob.height());
  const int w = prob.width();
  const int h = prob.height();
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const int sx = t.kind == TtaKind::hflip ? w - 1 - x : x;
        const int sy = t.kind == TtaKind::vflip ? h - 1 - y : y;
        out.at(x, y, c) = prob.at(sx, sy, c);
      }
    }
  }
  return out;
}

UncertaintyStatistic parse_statistic(std::string_view s) {
  if (s == "entropy" || s == "normalized_entropy") return UncertaintyStatistic::normalized_entropy;
  if (s == "maxprob-std" || s == "max_prob_std") return UncertaintyStatistic::max_prob_std;
  throw std::invalid_argument("unknown uncertainty statistic '" + std::string(s) + "'");
}

FloatImage uncertainty_map(std::span<const ProbMap> aligned, UncertaintyStatistic stat) {
  if (aligned.empty()) throw std::invalid_argument("uncertainty_map: no probability maps");
  const int w = aligned[0].width();
  const int h = aligned[0].height();
  for (std::size_t i = 1; i < aligned.size(); ++i) {
    if (aligned[i].width() != w || aligned[i].height() != h) {
      throw std::invalid_argument("uncertainty_map: map " + std::to_string(i) + " is " +
                                  std::to_string(aligned[i].width()) + "x" +
                                  std::to_string(aligned[i].height()) + ", expected " +
                                  std::to_string(w) + "x" + std::to_string(h));
    }
  }

  const double n = static_cast<double>(aligned.size());
  const double log_k = std::log(static_cast<double>(kNumClasses));
  FloatImage out(w, h, 0.0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double u = 0.0;
      if (stat == UncertaintyStatistic::normalized_entropy) {
        std::array<double, kNumClasses> mean{};
        for (const auto& m : aligned) {
          for (std::size_t c = 0; c < kNumClasses; ++c) mean[c] += m.at(x, y, c);
        }
        double total = 0.0;
        for (double& v : mean) total += v;
        if (total > 0.0) {
          double entropy = 0.0;
          for (double v : mean) {
            const double p = v / total;
            if (p > 0.0) entropy -= p * std::log(p);
          }
          u = entropy / log_k;
        }
      } else {
        double s = 0.0;
        double s2 = 0.0;
        for (const auto& m : aligned) {
          double best = 0.0;
          for (std::size_t c = 0; c < kNumClasses; ++c) best = std::max(best, double(m.at(x, y, c)));
          s += best;
          s2 += best * best;
        }
        const double mu = s / n;
        u = 2.0 * std::sqrt(std::max(0.0, s2 / n - mu * mu));
      }
      out.at(x, y) = std::clamp(u, 0.0, 1.0);
    }
  }
  return out;
}

std::array<std::uint8_t, 3> hot_color(double u) {
  u = std::clamp(u, 0.0, 1.0);
  const double r = std::clamp(u * 8.0 / 3.0, 0.0, 1.0);
  const double g = std::clamp(u * 8.0 / 3.0 - 1.0, 0.0, 1.0);
  const double b = std::clamp(u * 4.0 - 3.0, 0.0, 1.0);
  return {quantize_u8(r * 255.0), quantize_u8(g * 255.0), quantize_u8(b * 255.0)};
}

RgbImage render_hot(const FloatImage& u, std::size_t* clipped) {
  RgbImage out{u.width(), u.height(), std::vector<std::uint8_t>(u.size() * 3)};
  std::size_t n_clipped = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (!(u[i] >= 0.0 && u[i] <= 1.0)) ++n_clipped;
    const auto c = hot_color(u[i]);
    std::copy(c.begin(), c.end(), out.data.begin() + static_cast<std::ptrdiff_t>(i * 3));
  }
  if (clipped) *clipped = n_clipped;
  return out;
}

}  // namespace mammopipe
