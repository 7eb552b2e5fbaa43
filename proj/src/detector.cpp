// Copyright 2026 The ADDM Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "addm/detector.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "addm/error.hpp"

namespace addm {

void DetectorModel::validate() const {
  if (!(outlier_rate >= 0.0 && outlier_rate <= 1.0))
    throw InvalidArgument("detector: outlier rate must be in [0, 1], got " +
                          std::to_string(outlier_rate));
  if (!std::isfinite(tau)) throw InvalidArgument("detector: threshold is not finite");
}

double compute_threshold(std::span<const double> scores, double outlier_rate) {
  if (scores.empty()) throw InvalidArgument("compute_threshold: no scores");
  if (!(outlier_rate >= 0.0 && outlier_rate <= 1.0))
    throw InvalidArgument("compute_threshold: outlier rate must be in [0, 1], got " +
                          std::to_string(outlier_rate));
  std::vector<double> s(scores.begin(), scores.end());
  for (std::size_t i = 0; i < s.size(); ++i)
    if (std::isnan(s[i]))
      throw InvalidArgument("compute_threshold: score " + std::to_string(i) + " is NaN");
  std::sort(s.begin(), s.end());
  const double pos = outlier_rate * static_cast<double>(s.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, s.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  if (frac == 0.0) return s[lo];
  return s[lo] + frac * (s[hi] - s[lo]);
}

DetectorModel fit_detector(std::span<const double> scores, double outlier_rate) {
  return {compute_threshold(scores, outlier_rate), outlier_rate};
}

Label classify(double density, const DetectorModel& model) {
  return density <= model.tau ? Label::Anomaly : Label::Normal;
}

std::vector<int> classify_all(std::span<const double> densities, const DetectorModel& model) {
  std::vector<int> out(densities.size());
  for (std::size_t i = 0; i < densities.size(); ++i)
    out[i] = classify(densities[i], model) == Label::Anomaly ? 1 : 0;
  return out;
}

std::vector<double> anomaly_scores(std::span<const double> densities) {
  std::vector<double> out(densities.size());
  for (std::size_t i = 0; i < densities.size(); ++i) out[i] = -densities[i];
  return out;
}

}  // namespace addm
