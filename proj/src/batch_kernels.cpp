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

#include "addm/batch_kernels.hpp"

#include <cmath>

#include "addm/error.hpp"

namespace addm::kernels {

double pairwise_dot(std::span<const double> a, std::span<const double> b) {
  constexpr std::size_t kLeaf = 32;
  if (a.size() <= kLeaf) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
  }
  const std::size_t half = a.size() / 2;
  return pairwise_dot(a.first(half), b.first(half)) +
         pairwise_dot(a.subspan(half), b.subspan(half));
}

namespace {

void check_features(const Tensor& X, const Tensor& W, std::span<const double> phases) {
  if (X.rank() != 2 || W.rank() != 2 || X.cols() != W.cols() || W.rows() != phases.size())
    throw ShapeError("fourier_features: X " + to_string(X.shape()) + ", W " +
                     to_string(W.shape()) + ", b [" + std::to_string(phases.size()) + "]");
}

inline void feature_row(std::span<const double> x, const Tensor& W,
                        std::span<const double> phases, double amp, std::span<double> out) {
  const std::size_t d = x.size();
  for (std::size_t j = 0; j < out.size(); ++j) {
    const double* w = W.data().data() + j * d;
    double z = phases[j];
    for (std::size_t k = 0; k < d; ++k) z += w[k] * x[k];
    out[j] = amp * std::cos(z);
  }
}

inline bool normalize_row(std::span<const double> in, std::span<double> out) {
  const double n = std::sqrt(squared_norm(in));
  if (!(n > 0.0)) return false;
  for (std::size_t j = 0; j < in.size(); ++j) out[j] = in[j] / n;
  return true;
}

inline double projected_row(std::span<const double> f, const Tensor& V,
                            std::span<const double> lambda) {
  double s = 0.0;
  for (std::size_t k = 0; k < lambda.size(); ++k) {
    const double p = dot(V.row(k), f);
    s += lambda[k] * p * p;
  }
  return s;
}

inline double kde_row(std::span<const double> q, const Tensor& train, double gamma) {
  double s = 0.0;
  for (std::size_t i = 0; i < train.rows(); ++i) {
    const auto x = train.row(i);
    double d2 = 0.0;
    for (std::size_t k = 0; k < q.size(); ++k) {
      const double t = q[k] - x[k];
      d2 += t * t;
    }
    s += std::exp(-gamma * d2);
  }
  return s;
}

void check_projection(const Tensor& F, const Tensor& V, std::span<const double> lambda) {
  if (F.rank() != 2 || V.rank() != 2 || V.cols() != F.cols() || V.rows() != lambda.size())
    throw ShapeError("projected_densities: F " + to_string(F.shape()) + ", V " +
                     to_string(V.shape()) + ", lambda [" + std::to_string(lambda.size()) + "]");
}

void check_kde(const Tensor& train, const Tensor& queries) {
  if (train.rank() != 2 || queries.rank() != 2 || train.cols() != queries.cols())
    throw ShapeError("kde_densities: train " + to_string(train.shape()) + ", queries " +
                     to_string(queries.shape()));
  if (train.rows() == 0) throw InvalidArgument("kde_densities: empty training set");
}

[[noreturn]] void zero_row(long r) {
  throw InvalidArgument("normalize_rows: row " + std::to_string(r) + " has zero norm");
}

}  // namespace

// The two namespaces below differ only in the `#pragma omp` lines.

namespace serial {

Tensor fourier_features(const Tensor& X, const Tensor& W, std::span<const double> phases) {
  check_features(X, W, phases);
  Tensor out(Shape{X.rows(), W.rows()});
  const double amp = std::sqrt(2.0 / static_cast<double>(W.rows()));
  for (std::size_t i = 0; i < X.rows(); ++i) feature_row(X.row(i), W, phases, amp, out.row(i));
  return out;
}

Tensor normalize_rows(const Tensor& F) {
  Tensor out(F.shape());
  for (std::size_t i = 0; i < F.rows(); ++i)
    if (!normalize_row(F.row(i), out.row(i))) zero_row(static_cast<long>(i));
  return out;
}

Tensor density_matrix(const Tensor& F) {
  const Tensor Ft = F.transposed();
  const std::size_t D = F.cols();
  const double inv_n = 1.0 / static_cast<double>(F.rows());
  Tensor rho(Shape{D, D});
  for (std::size_t j = 0; j < D; ++j)
    for (std::size_t k = j; k < D; ++k) rho(j, k) = rho(k, j) = pairwise_dot(Ft.row(j), Ft.row(k)) * inv_n;
  return rho;
}

Tensor gram_matrix(const Tensor& F) {
  const std::size_t N = F.rows();
  const double inv_n = 1.0 / static_cast<double>(N);
  Tensor G(Shape{N, N});
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = i; j < N; ++j) G(i, j) = G(j, i) = pairwise_dot(F.row(i), F.row(j)) * inv_n;
  return G;
}

std::vector<double> projected_densities(const Tensor& F, const Tensor& V,
                                        std::span<const double> lambda, double normalization) {
  check_projection(F, V, lambda);
  std::vector<double> out(F.rows());
  for (std::size_t i = 0; i < F.rows(); ++i)
    out[i] = projected_row(F.row(i), V, lambda) / normalization;
  return out;
}

std::vector<double> kde_densities(const Tensor& train, const Tensor& queries, double gamma,
                                  double normalization) {
  check_kde(train, queries);
  const double scale = 1.0 / (static_cast<double>(train.rows()) * normalization);
  std::vector<double> out(queries.rows());
  for (std::size_t i = 0; i < queries.rows(); ++i)
    out[i] = kde_row(queries.row(i), train, gamma) * scale;
  return out;
}

}  // namespace serial

namespace omp {

Tensor fourier_features(const Tensor& X, const Tensor& W, std::span<const double> phases) {
  check_features(X, W, phases);
  Tensor out(Shape{X.rows(), W.rows()});
  const double amp = std::sqrt(2.0 / static_cast<double>(W.rows()));
  const long n = static_cast<long>(X.rows());
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i) feature_row(X.row(i), W, phases, amp, out.row(i));
  return out;
}

Tensor normalize_rows(const Tensor& F) {
  Tensor out(F.shape());
  const long n = static_cast<long>(F.rows());
  long bad = -1;
#pragma omp parallel for schedule(static) reduction(max : bad)
  for (long i = 0; i < n; ++i)
    if (!normalize_row(F.row(i), out.row(i))) bad = std::max(bad, i);
  if (bad >= 0) zero_row(bad);
  return out;
}

Tensor density_matrix(const Tensor& F) {
  const Tensor Ft = F.transposed();
  const long D = static_cast<long>(F.cols());
  const double inv_n = 1.0 / static_cast<double>(F.rows());
  Tensor rho(Shape{F.cols(), F.cols()});
#pragma omp parallel for schedule(dynamic, 8)
  for (long j = 0; j < D; ++j)
    for (long k = j; k < D; ++k) rho(j, k) = rho(k, j) = pairwise_dot(Ft.row(j), Ft.row(k)) * inv_n;
  return rho;
}

Tensor gram_matrix(const Tensor& F) {
  const long N = static_cast<long>(F.rows());
  const double inv_n = 1.0 / static_cast<double>(N);
  Tensor G(Shape{F.rows(), F.rows()});
#pragma omp parallel for schedule(dynamic, 8)
  for (long i = 0; i < N; ++i)
    for (long j = i; j < N; ++j) G(i, j) = G(j, i) = pairwise_dot(F.row(i), F.row(j)) * inv_n;
  return G;
}

std::vector<double> projected_densities(const Tensor& F, const Tensor& V,
                                        std::span<const double> lambda, double normalization) {
  check_projection(F, V, lambda);
  std::vector<double> out(F.rows());
  const long n = static_cast<long>(F.rows());
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i) out[i] = projected_row(F.row(i), V, lambda) / normalization;
  return out;
}

std::vector<double> kde_densities(const Tensor& train, const Tensor& queries, double gamma,
                                  double normalization) {
  check_kde(train, queries);
  const double scale = 1.0 / (static_cast<double>(train.rows()) * normalization);
  std::vector<double> out(queries.rows());
  const long n = static_cast<long>(queries.rows());
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i) out[i] = kde_row(queries.row(i), train, gamma) * scale;
  return out;
}

}  // namespace omp

}  // namespace addm::kernels
