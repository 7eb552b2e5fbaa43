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

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "addm/tensor.hpp"

namespace addm {

/// Explicit feature map phi(x) = sqrt(2/D) cos(W x + b) whose inner products
/// approximate exp(-gamma |x - y|^2).
struct FourierFeatureMap {
  Tensor weights;              ///< D x d frequencies
  std::vector<double> phases;  ///< D phases
  double gamma = 1.0;

  std::size_t features() const noexcept { return weights.rows(); }
  std::size_t input_dim() const noexcept { return weights.cols(); }
};

/// Frequencies i.i.d. N(0, 2 gamma I), phases i.i.d. Uniform[0, 2 pi).
FourierFeatureMap sample_rff(std::size_t input_dim, std::size_t features, double gamma,
                             std::uint64_t seed);

std::vector<double> feature_map(const FourierFeatureMap& map, std::span<const double> x);
Tensor feature_map(const FourierFeatureMap& map, const Tensor& X);

/// phi / |phi|. Throws on the zero vector.
std::vector<double> normalize_features(std::span<const double> phi);

/// Unit-norm features for every row of X.
Tensor normalized_feature_map(const FourierFeatureMap& map, const Tensor& X);

/// (1/m) sum_i (k(l_i, r_i) - <phi(l_i), phi(r_i)>)^2 over the row pairs of
/// `left` and `right`.
double kernel_mse(const FourierFeatureMap& map, const Tensor& left, const Tensor& right,
                  double gamma);

struct AffOptions {
  std::size_t num_pairs = 5000;      ///< training pairs drawn per epoch
  std::size_t epochs = 30;
  double lr = 0.5;
  std::size_t batch_size = 64;
  std::size_t holdout_pairs = 2000;  ///< fixed pair sample used for checkpointing
  std::uint64_t seed = 42;
};

struct AffResult {
  FourierFeatureMap map;  ///< best parameters on the held-out pairs
  double initial_mse = 0.0;
  double best_mse = 0.0;
  std::size_t best_epoch = 0;          ///< 0 = the initial map
  std::vector<double> holdout_history; ///< held-out MSE after each epoch
};

/// Adaptive Fourier features: fit (W, b) by minibatch gradient descent so that
/// feature inner products match the Gaussian kernel on random data pairs.
/// Throws DivergenceError if the loss stops being finite.
AffResult train_aff(const FourierFeatureMap& init, const Tensor& data, double gamma,
                    const AffOptions& options);

}  // namespace addm
