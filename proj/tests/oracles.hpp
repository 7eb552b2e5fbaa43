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

// Reference computations used as test oracles. Everything here is written
// from the defining formulas and shares no code with the library beyond the
// Tensor container.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <random>
#include <utility>
#include <vector>

#include "addm/tensor.hpp"

namespace oracle {

using Matrix = std::vector<std::vector<double>>;

inline Matrix to_matrix(const addm::Tensor& t) {
  Matrix m(t.rows(), std::vector<double>(t.cols()));
  for (std::size_t i = 0; i < t.rows(); ++i)
    for (std::size_t j = 0; j < t.cols(); ++j) m[i][j] = t(i, j);
  return m;
}

/// Cyclic Jacobi rotations on a symmetric matrix. Returns eigenvalues in
/// ascending order with the eigenvectors as columns of `vectors`.
struct Eigen {
  std::vector<double> values;
  Matrix vectors;
};

inline Eigen jacobi(Matrix a, int sweeps = 100) {
  const std::size_t n = a.size();
  Matrix v(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) v[i][i] = 1.0;
  for (int s = 0; s < sweeps; ++s) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a[p][q] * a[p][q];
    if (off < 1e-30) break;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        if (std::abs(a[p][q]) < 1e-300) continue;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0), sn = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - sn * akq;
          a[k][q] = sn * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - sn * aqk;
          a[q][k] = sn * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v[k][p], vkq = v[k][q];
          v[k][p] = c * vkp - sn * vkq;
          v[k][q] = sn * vkp + c * vkq;
        }
      }
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](auto x, auto y) { return a[x][x] < a[y][y]; });
  Eigen e{std::vector<double>(n), Matrix(n, std::vector<double>(n))};
  for (std::size_t k = 0; k < n; ++k) {
    e.values[k] = a[order[k]][order[k]];
    for (std::size_t i = 0; i < n; ++i) e.vectors[i][k] = v[i][order[k]];
  }
  return e;
}

/// Probability that a random positive outscores a random negative, by
/// enumerating every pair.
inline double auc_pairs(const std::vector<double>& s, const std::vector<int>& y) {
  double wins = 0.0, pairs = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = 0; j < s.size(); ++j)
      if (y[i] == 1 && y[j] == 0) {
        pairs += 1.0;
        wins += s[i] > s[j] ? 1.0 : (s[i] == s[j] ? 0.5 : 0.0);
      }
  return wins / pairs;
}

/// Precision-recall area by sweeping every distinct score as a threshold
/// (predict positive iff score >= t), joining successive points linearly and
/// holding the first precision from recall 0.
inline double auc_pr_sweep(const std::vector<double>& s, const std::vector<int>& y) {
  std::vector<double> thresholds = s;
  std::sort(thresholds.begin(), thresholds.end(), std::greater<>());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
  const double pos = static_cast<double>(std::count(y.begin(), y.end(), 1));
  std::vector<std::pair<double, double>> pts;  // (recall, precision)
  for (double t : thresholds) {
    double tp = 0.0, flagged = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i)
      if (s[i] >= t) {
        flagged += 1.0;
        tp += y[i];
      }
    pts.emplace_back(tp / pos, tp / flagged);
  }
  double area = pts.front().first * pts.front().second;
  for (std::size_t k = 1; k < pts.size(); ++k)
    area += (pts[k].first - pts[k - 1].first) * 0.5 * (pts[k].second + pts[k - 1].second);
  return area;
}

/// Support-weighted F1 from the confusion matrix.
inline double weighted_f1(const std::vector<int>& pred, const std::vector<int>& truth) {
  double total = 0.0;
  for (int c = 0; c <= 1; ++c) {
    double tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
      tp += pred[i] == c && truth[i] == c;
      fp += pred[i] == c && truth[i] != c;
      fn += pred[i] != c && truth[i] == c;
    }
    const double f1 = tp == 0 ? 0.0 : 2 * tp / (2 * tp + fp + fn);
    total += (tp + fn) * f1;
  }
  return total / static_cast<double>(truth.size());
}

/// Composite trapezoid rule of f on [a, b] with n points.
inline double trapezoid(const std::function<double(double)>& f, double a, double b,
                        std::size_t n) {
  const double h = (b - a) / static_cast<double>(n - 1);
  double s = 0.5 * (f(a) + f(b));
  for (std::size_t i = 1; i + 1 < n; ++i) s += f(a + h * static_cast<double>(i));
  return s * h;
}

inline std::vector<double> average_ranks(const std::vector<double>& v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    for (std::size_t k = i; k <= j; ++k) r[idx[k]] = 0.5 * static_cast<double>(i + j) + 1.0;
    i = j + 1;
  }
  return r;
}

/// Pearson correlation of average ranks.
inline double spearman(const std::vector<double>& a, const std::vector<double>& b) {
  const auto ra = average_ranks(a), rb = average_ranks(b);
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
  const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    sab += (ra[i] - ma) * (rb[i] - mb);
    saa += (ra[i] - ma) * (ra[i] - ma);
    sbb += (rb[i] - mb) * (rb[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

/// Direct Gaussian kernel sum, (1 / (N M)) sum_i exp(-gamma |x_i - q|^2).
inline double parzen(const std::vector<std::vector<double>>& train, const std::vector<double>& q,
                     double gamma) {
  const double d = static_cast<double>(q.size());
  const double M = std::pow(M_PI / gamma, d / 2.0);
  double s = 0.0;
  for (const auto& x : train) {
    double dist = 0.0;
    for (std::size_t j = 0; j < q.size(); ++j) dist += (x[j] - q[j]) * (x[j] - q[j]);
    s += std::exp(-gamma * dist);
  }
  return s / (static_cast<double>(train.size()) * M);
}

inline addm::Tensor random_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& rng,
                                  double lo = -2.0, double hi = 2.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  addm::Tensor t(addm::Shape{rows, cols});
  for (double& v : t.data()) v = u(rng);
  return t;
}

inline addm::Tensor random_unit_rows(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  addm::Tensor t(addm::Shape{rows, cols});
  for (std::size_t i = 0; i < rows; ++i) {
    double s = 0.0;
    for (double& v : t.row(i)) s += (v = n(rng)) * v;
    for (double& v : t.row(i)) v /= std::sqrt(s);
  }
  return t;
}

/// Two 2-D Gaussian blobs (unit variance, centres (+-3, 0)) of normals plus
/// anomalies uniform on the box [-8, 8]^2 minus the radius-3 discs around the
/// centres. Anomalies are labeled 1.
inline std::pair<addm::Tensor, std::vector<int>> blobs_with_anomalies(std::size_t n,
                                                                       double anomaly_rate,
                                                                       std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> box(-8.0, 8.0);
  const auto n_anom = static_cast<std::size_t>(std::lround(anomaly_rate * static_cast<double>(n)));
  addm::Tensor X(addm::Shape{n, 2});
  std::vector<int> y(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (i < n - n_anom) {
      X(i, 0) = (i % 2 == 0 ? 3.0 : -3.0) + g(rng);
      X(i, 1) = g(rng);
    } else {
      double a = 0.0, b = 0.0;
      do {
        a = box(rng);
        b = box(rng);
      } while ((a - 3.0) * (a - 3.0) + b * b < 9.0 || (a + 3.0) * (a + 3.0) + b * b < 9.0);
      X(i, 0) = a;
      X(i, 1) = b;
      y[i] = 1;
    }
  }
  return {X, y};
}

}  // namespace oracle
