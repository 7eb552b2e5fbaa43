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

#include <span>

namespace addm {

// Labels are 1 = anomaly (positive class), 0 = normal. Scores are anomaly
// scores: higher means more anomalous.

/// Probability that a random anomaly outscores a random normal, ties 1/2.
/// Throws InvalidArgument unless both classes are present.
double auc_roc(std::span<const double> scores, std::span<const int> labels);

/// Area under the precision-recall curve from a descending threshold sweep.
/// Operating points are taken after each group of tied scores and joined
/// linearly; the curve starts at (0, precision of the first point).
/// Throws InvalidArgument without positives.
double auc_pr(std::span<const double> scores, std::span<const int> labels);

/// Support-weighted mean of the per-class F1 scores; a class with no
/// predictions or no support contributes F1 = 0.
double f1_score(std::span<const int> predicted, std::span<const int> truth);

}  // namespace addm
