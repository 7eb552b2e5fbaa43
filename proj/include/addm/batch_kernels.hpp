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

// Data-parallel batch kernels. Every kernel exists twice: a serial reference
// in kernels::serial and an OpenMP version in kernels::omp. Both compute each
// output row with the same per-row routine in the same summation order, so
// their results are bit-identical; tests/test_batch_kernels.cpp checks this and
// bench/bench_kernels.cpp compares their speed.

#include <span>
#include <vector>

#include "addm/tensor.hpp"

namespace addm::kernels {

/// Sum of a[i]*b[i] by recursive halving; the result is independent of
/// thread count and has O(log n) error growth.
double pairwise_dot(std::span<const double> a, std::span<const double> b);

// Kernel contracts (F, X, queries and train hold one sample per row):
//   fourier_features     sqrt(2/D) cos(W x + b) for every row x; W is D x d
//   normalize_rows       each row over its L2 norm; throws on a zero row
//   density_matrix       (1/N) sum_i f_i f_i^T, D x D
//   gram_matrix          (1/N) F F^T, N x N
//   projected_densities  sum_k lambda_k (V_k . f)^2 / normalization per row f
//   kde_densities        (1 / (N M)) sum_i exp(-gamma |q - x_i|^2) per query q

namespace serial {
Tensor fourier_features(const Tensor& X, const Tensor& W, std::span<const double> phases);
Tensor normalize_rows(const Tensor& F);
Tensor density_matrix(const Tensor& F);
Tensor gram_matrix(const Tensor& F);
std::vector<double> projected_densities(const Tensor& F, const Tensor& V,
                                        std::span<const double> lambda, double normalization);
std::vector<double> kde_densities(const Tensor& train, const Tensor& queries, double gamma,
                                  double normalization);
}  // namespace serial

namespace omp {
Tensor fourier_features(const Tensor& X, const Tensor& W, std::span<const double> phases);
Tensor normalize_rows(const Tensor& F);
Tensor density_matrix(const Tensor& F);
Tensor gram_matrix(const Tensor& F);
std::vector<double> projected_densities(const Tensor& F, const Tensor& V,
                                        std::span<const double> lambda, double normalization);
std::vector<double> kde_densities(const Tensor& train, const Tensor& queries, double gamma,
                                  double normalization);
}  // namespace omp

using omp::density_matrix;
using omp::fourier_features;
using omp::gram_matrix;
using omp::kde_densities;
using omp::normalize_rows;
using omp::projected_densities;

}  // namespace addm::kernels
