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

#include "addm/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "addm/error.hpp"

namespace addm {

namespace {

void check_inputs(std::span<const double> scores, std::span<const int> labels, const char* who) {
  if (scores.size() != labels.size())
    throw ShapeError(std::string(who) + ": " + std::to_string(scores.size()) + " scores vs " +
                     std::to_string(labels.size()) + " labels");
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] != 0 && labels[i] != 1)
      throw InvalidArgument(std::string(who) + ": label " + std::to_string(i) + " is not 0 or 1");
    if (std::isnan(scores[i]))
      throw InvalidArgument(std::string(who) + ": score " + std::to_string(i) + " is NaN");
  }
}

// Indices sorted by descending score.
std::vector<std::size_t> descending(std::span<const double> scores) {
  std::vector<std::size_t> idx(scores.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  return idx;
}

}  // namespace

double auc_roc(std::span<const double> scores, std::span<const int> labels) {
  check_inputs(scores, labels, "auc_roc");
  const auto pos = static_cast<double>(std::count(labels.begin(), labels.end(), 1));
  const double neg = static_cast<double>(labels.size()) - pos;
  if (pos == 0.0 || neg == 0.0) throw InvalidArgument("auc_roc: both classes must be present");

  // Each positive beats every negative of strictly lower score and ties with
  // the negatives in its score group.
  const auto idx = descending(scores);
  double below = neg;  // negatives with score <= current group
  double wins = 0.0;
  for (std::size_t g = 0; g < idx.size();) {
    std::size_t e = g;
    double p = 0.0, n = 0.0;
    while (e < idx.size() && scores[idx[e]] == scores[idx[g]]) {
      (labels[idx[e]] == 1 ? p : n) += 1.0;
      ++e;
    }
    below -= n;
    wins += p * (below + 0.5 * n);
    g = e;
  }
  return wins / (pos * neg);
}

double auc_pr(std::span<const double> scores, std::span<const int> labels) {
  check_inputs(scores, labels, "auc_pr");
  const auto pos = static_cast<double>(std::count(labels.begin(), labels.end(), 1));
  if (pos == 0.0) throw InvalidArgument("auc_pr: no positive labels");

  const auto idx = descending(scores);
  double tp = 0.0, fp = 0.0;
  double area = 0.0, prev_recall = 0.0, prev_precision = -1.0;
  for (std::size_t g = 0; g < idx.size();) {
    std::size_t e = g;
    while (e < idx.size() && scores[idx[e]] == scores[idx[g]]) {
      (labels[idx[e]] == 1 ? tp : fp) += 1.0;
      ++e;
    }
    const double recall = tp / pos, precision = tp / (tp + fp);
    if (prev_precision < 0.0) prev_precision = precision;
    area += (recall - prev_recall) * 0.5 * (precision + prev_precision);
    prev_recall = recall;
    prev_precision = precision;
    g = e;
  }
  return area;
}

double f1_score(std::span<const int> predicted, std::span<const int> truth) {
  if (predicted.size() != truth.size())
    throw ShapeError("f1_score: " + std::to_string(predicted.size()) + " predictions vs " +
                     std::to_string(truth.size()) + " labels");
  if (truth.empty()) throw InvalidArgument("f1_score: no labels");
  double weighted = 0.0;
  for (int c : {0, 1}) {
    double tp = 0.0, pred = 0.0, support = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
      if ((predicted[i] != 0 && predicted[i] != 1) || (truth[i] != 0 && truth[i] != 1))
        throw InvalidArgument("f1_score: label " + std::to_string(i) + " is not 0 or 1");
      pred += predicted[i] == c;
      support += truth[i] == c;
      tp += predicted[i] == c && truth[i] == c;
    }
    if (tp == 0.0) continue;
    const double precision = tp / pred, recall = tp / support;
    weighted += support * 2.0 * precision * recall / (precision + recall);
  }
  return weighted / static_cast<double>(truth.size());
}

}  // namespace addm
