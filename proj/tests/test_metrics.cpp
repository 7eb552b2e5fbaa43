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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "addm/error.hpp"
#include "addm/metrics.hpp"
#include "oracles.hpp"

using namespace addm;

TEST_CASE("auc_roc examples") {
  CHECK(auc_roc(std::vector{0.9, 0.8, 0.2, 0.1}, std::vector{1, 1, 0, 0}) == 1.0);
  CHECK(auc_roc(std::vector{0.2, 0.9}, std::vector{1, 0}) == 0.0);
  CHECK(auc_roc(std::vector{0.9, 0.8, 0.7, 0.6}, std::vector{1, 0, 1, 0}) == 0.75);
  CHECK(auc_roc(std::vector{0.5, 0.5, 0.5}, std::vector{1, 0, 0}) == 0.5);
}

TEST_CASE("auc_pr examples") {
  CHECK(auc_pr(std::vector{0.9, 0.8, 0.2, 0.1}, std::vector{1, 1, 0, 0}) == 1.0);
  CHECK(auc_pr(std::vector{4.0, 3.0, 2.0, 1.0}, std::vector{1, 0, 1, 0}) ==
        doctest::Approx(19.0 / 24.0).epsilon(1e-15));
  CHECK(auc_pr(std::vector(10, 1.0), std::vector{1, 0, 0, 0, 1, 0, 0, 0, 0, 0}) ==
        doctest::Approx(0.2).epsilon(1e-15));
}

TEST_CASE("f1_score examples") {
  CHECK(f1_score(std::vector{1, 0, 1, 0}, std::vector{1, 0, 1, 0}) == 1.0);
  std::vector<int> truth(100, 0), none(100, 0);
  for (int i = 0; i < 10; ++i) truth[i] = 1;
  CHECK(f1_score(none, truth) == doctest::Approx(0.9 * (2 * 0.9 / 1.9)).epsilon(1e-15));
  CHECK(f1_score(none, truth) == doctest::Approx(0.8526).epsilon(1e-4));
  CHECK(f1_score(std::vector{0, 1, 0, 1}, std::vector{1, 0, 1, 0}) == 0.0);
}

TEST_CASE("metrics agree with brute-force oracles on random data") {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> level(0, 6), bit(0, 1);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + static_cast<std::size_t>(trial % 40);
    std::vector<double> s(n);
    std::vector<int> y(n), pred(n);
    // Few distinct levels so ties are common.
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = trial % 2 ? level(rng) : level(rng) + 0.001 * static_cast<double>(i);
      y[i] = bit(rng);
      pred[i] = bit(rng);
    }
    y[0] = 1;
    y[1] = 0;
    CHECK(auc_roc(s, y) == doctest::Approx(oracle::auc_pairs(s, y)).epsilon(1e-12));
    CHECK(auc_pr(s, y) == doctest::Approx(oracle::auc_pr_sweep(s, y)).epsilon(1e-12));
    CHECK(f1_score(pred, y) == doctest::Approx(oracle::weighted_f1(pred, y)).epsilon(1e-12));
    const double roc = auc_roc(s, y), pr = auc_pr(s, y);
    CHECK(roc >= 0.0);
    CHECK(roc <= 1.0);
    CHECK(pr >= 0.0);
    CHECK(pr <= 1.0);
  }
}

TEST_CASE("ranking metrics are invariant under monotone transforms") {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<double> s(80), t(80);
  std::vector<int> y(80);
  for (std::size_t i = 0; i < 80; ++i) {
    y[i] = i % 5 == 0;
    s[i] = n(rng) + 1.5 * y[i];
    t[i] = std::exp(3.0 * s[i]) + 7.0;
  }
  CHECK(auc_roc(s, y) == auc_roc(t, y));
  CHECK(auc_pr(s, y) == auc_pr(t, y));
}

TEST_CASE("metric errors") {
  CHECK_THROWS_AS(auc_roc(std::vector{0.1, 0.2}, std::vector{1, 1}), InvalidArgument);
  CHECK_THROWS_AS(auc_roc(std::vector{0.1}, std::vector{1, 0}), ShapeError);
  CHECK_THROWS_AS(auc_roc(std::vector{0.1, 0.2}, std::vector{1, 2}), InvalidArgument);
  CHECK_THROWS_AS(auc_roc(std::vector{std::nan(""), 0.2}, std::vector{1, 0}), InvalidArgument);
  CHECK_THROWS_AS(auc_pr(std::vector{0.1, 0.2}, std::vector{0, 0}), InvalidArgument);
  CHECK_THROWS_AS(f1_score(std::vector{1}, std::vector{1, 0}), ShapeError);
}
