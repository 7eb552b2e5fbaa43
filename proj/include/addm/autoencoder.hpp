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
#include <string_view>
#include <vector>

#include "addm/autodiff.hpp"
#include "addm/density_matrix.hpp"
#include "addm/fourier_features.hpp"
#include "addm/tensor.hpp"

namespace addm {

enum class Activation : std::uint8_t { Linear = 0, Relu = 1 };

/// y = act(W x + b)
struct DenseLayer {
  Tensor weights;  ///< out x in
  Tensor bias;     ///< out
  Activation activation = Activation::Linear;

  std::size_t inputs() const noexcept { return weights.cols(); }
  std::size_t outputs() const noexcept { return weights.rows(); }
};

/// Encoder maps d -> p, decoder maps p -> d.
struct AutoencoderParams {
  std::vector<DenseLayer> encoder;
  std::vector<DenseLayer> decoder;

  std::size_t input_dim() const;
  std::size_t latent_dim() const;
  /// Throws ShapeError unless the layers chain d -> ... -> p -> ... -> d.
  void validate() const;
};

/// Encoder d -> sizes[0] -> ... -> sizes.back() = p, decoder mirrored back to
/// d. Hidden layers use ReLU, the last layer of each half is linear. Weights
/// are Glorot-uniform, biases zero.
AutoencoderParams make_autoencoder(std::size_t input_dim, const std::vector<std::size_t>& sizes,
                                   std::uint64_t seed);

std::vector<double> encode(const AutoencoderParams& params, std::span<const double> x);
std::vector<double> decode(const AutoencoderParams& params, std::span<const double> z);
Tensor encode(const AutoencoderParams& params, const Tensor& X);
Tensor decode(const AutoencoderParams& params, const Tensor& Z);

struct ReconstructionFeatures {
  double euc = 0.0;  ///< |x - x_hat|^2
  double cos = 0.0;  ///< in [-1, 1]; 0 when either vector is zero
};

ReconstructionFeatures reconstruction_features(std::span<const double> x,
                                               std::span<const double> x_hat);

/// (1 - alpha) |x - x_hat|^2 - alpha log(max(f, 1e-30))
double laddm_loss(std::span<const double> x, std::span<const double> x_hat, double density,
                  double alpha);

/// Which vector enters the Fourier feature map: the latent code z alone, or
/// o = [z, euc, cos].
enum class AffInput : std::uint8_t { Latent = 0, Augmented = 1 };

std::string_view aff_input_name(AffInput mode);
AffInput parse_aff_input(std::string_view name);

/// Rows of the feature-map input for every sample of X (see AffInput).
Tensor density_inputs(const AutoencoderParams& params, const Tensor& X, AffInput mode);

/// Squared reconstruction distance per row.
std::vector<double> reconstruction_errors(const AutoencoderParams& params, const Tensor& X);

struct AutoencoderTrainOptions {
  std::size_t epochs = 100;
  double lr = 1e-2;  ///< Adam step size
  std::size_t batch_size = 64;
  std::uint64_t seed = 42;
};

struct AutoencoderTrainResult {
  AutoencoderParams params;  ///< lowest mean reconstruction error seen
  double initial_loss = 0.0;
  double best_loss = 0.0;
  std::size_t best_epoch = 0;
  std::vector<double> history;  ///< mean reconstruction error after each epoch
};

/// Minimize mean |x - x_hat|^2 with Adam.
AutoencoderTrainResult train_autoencoder(const AutoencoderParams& init, const Tensor& X,
                                         const AutoencoderTrainOptions& options);

struct LaddmConfig {
  std::vector<std::size_t> encoder_sizes{16, 4};
  double gamma = 1.0;
  std::size_t features = 256;
  std::size_t rank = 32;
  double alpha = 0.5;
  std::size_t epochs = 100;
  double lr = 1e-2;  ///< Adam step size for the joint phase
  std::size_t batch_size = 64;
  std::size_t warmup_epochs = 10;  ///< reconstruction-only epochs before the feature fit
  AffOptions aff{};
  AffInput aff_input = AffInput::Augmented;
  std::uint64_t seed = 42;

  void validate() const;
};

struct LaddmModel {
  AutoencoderParams autoencoder;
  FourierFeatureMap feature_map;
  DensityMatrixModel density;
  AffInput aff_input = AffInput::Augmented;
};

struct LaddmTrainResult {
  LaddmModel model;  ///< lowest full-data training loss seen
  double initial_loss = 0.0;  ///< at the start of the joint phase
  double best_loss = 0.0;
  std::size_t best_epoch = 0;
  std::vector<double> loss_history;  ///< full-data training loss after each epoch
  std::vector<double> best_history;  ///< running minimum of loss_history
};

/// Parameter leaves and outputs of the joint loss graph for one batch.
struct LaddmGraph {
  struct Layer {
    ad::Var weights, bias;
    Activation activation;
  };
  std::vector<Layer> encoder, decoder;
  ad::Var eigenvectors, logits;
  ad::Var reconstruction;  ///< per-row |x - x_hat|^2
  ad::Var densities;       ///< per-row density estimate
  ad::Var loss;            ///< scalar batch mean
};

/// Build the joint loss graph for one batch. Autoencoder weights, V and the
/// eigenvalue logits are variables; the feature map is constant.
LaddmGraph build_laddm_graph(ad::Graph& graph, const Tensor& batch, const AutoencoderParams& ae,
                             const FourierFeatureMap& map, const Tensor& eigenvectors,
                             const Tensor& logits, double normalization, double alpha,
                             AffInput mode);

/// Warm-up, feature fit on the warm encoder's outputs, density initialization,
/// then joint Adam training of (encoder, decoder, V, lambda). With epochs == 0
/// no training happens at all and the initialized model is returned.
LaddmTrainResult train_laddm(const Tensor& X, const LaddmConfig& config);

/// Full-data mean of the joint loss.
double laddm_training_loss(const LaddmModel& model, const Tensor& X, double alpha);

/// Density estimate per row of X.
std::vector<double> score_laddm(const LaddmModel& model, const Tensor& X);

}  // namespace addm
