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

#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace addm {

/// Densities at or below tau are anomalies.
struct DetectorModel {
  double tau = 0.0;
  double outlier_rate = 0.0;  ///< in [0, 1]

  void validate() const;
};

/// The outlier_rate quantile of `scores`, interpolating linearly between
/// neighbouring order statistics.
double compute_threshold(std::span<const double> scores, double outlier_rate);

DetectorModel fit_detector(std::span<const double> scores, double outlier_rate);

enum class Label : std::uint8_t { Normal = 0, Anomaly = 1 };

Label classify(double density, const DetectorModel& model);

/// 1 = anomaly, 0 = normal, per score.
std::vector<int> classify_all(std::span<const double> densities, const DetectorModel& model);

/// Higher = more anomalous (negated density), for ranking metrics.
std::vector<double> anomaly_scores(std::span<const double> densities);

}  // namespace addm
