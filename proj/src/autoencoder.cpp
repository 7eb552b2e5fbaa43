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

#include "addm/autoencoder.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "addm/batch_kernels.hpp"
#include "addm/error.hpp"
#include "addm/kde.hpp"
#include "addm/optimizer.hpp"
#include "addm/rng.hpp"

namespace addm {

namespace {

DenseLayer glorot_layer(std::size_t in, std::size_t out, Activation act, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(in + out));
  std::uniform_real_distribution<double> u(-limit, limit);
  DenseLayer layer{Tensor(Shape{out, in}), Tensor(Shape{out}), act};
  for (double& w : layer.weights.data()) w = u(rng);
  return layer;
}

Tensor apply_layers(const std::vector<DenseLayer>& layers, Tensor h) {
  for (const DenseLayer& layer : layers) {
    if (h.cols() != layer.inputs())
      throw ShapeError("dense layer: expected " + std::to_string(layer.inputs()) +
                       " inputs, got " + std::to_string(h.cols()));
    Tensor out(Shape{h.rows(), layer.outputs()});
    for (std::size_t r = 0; r < h.rows(); ++r) {
      const auto x = h.row(r);
      auto y = out.row(r);
      for (std::size_t j = 0; j < layer.outputs(); ++j) {
        const double v = dot(layer.weights.row(j), x) + layer.bias[j];
        y[j] = layer.activation == Activation::Relu ? std::max(v, 0.0) : v;
      }
    }
    h = std::move(out);
  }
  return h;
}

Tensor as_row(std::span<const double> x) {
  return Tensor(Shape{1, x.size()}, std::vector<double>(x.begin(), x.end()));
}

double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

std::vector<LaddmGraph::Layer> bind_layers(ad::Graph& g, const std::vector<DenseLayer>& layers) {
  std::vector<LaddmGraph::Layer> out;
  for (const DenseLayer& l : layers)
    out.push_back({g.variable(l.weights), g.variable(l.bias), l.activation});
  return out;
}

ad::Var run_layers(ad::Var h, const std::vector<LaddmGraph::Layer>& layers) {
  for (const auto& l : layers) {
    h = ad::matmul_t(h, l.weights) + l.bias;
    if (l.activation == Activation::Relu) h = ad::relu(h);
  }
  return h;
}

std::vector<Tensor*> parameter_tensors(AutoencoderParams& ae) {
  std::vector<Tensor*> out;
  for (auto* half : {&ae.encoder, &ae.decoder})
    for (DenseLayer& l : *half) {
      out.push_back(&l.weights);
      out.push_back(&l.bias);
    }
  return out;
}

void append_gradients(const ad::Gradients& grads, const std::vector<LaddmGraph::Layer>& layers,
                      std::vector<const Tensor*>& out) {
  for (const auto& l : layers) {
    out.push_back(&grads[l.weights]);
    out.push_back(&grads[l.bias]);
  }
}

bool all_finite(const std::vector<Tensor*>& tensors) {
  return std::all_of(tensors.begin(), tensors.end(), [](const Tensor* t) { return t->all_finite(); });
}

}  // namespace

std::size_t AutoencoderParams::input_dim() const {
  return encoder.empty() ? 0 : encoder.front().inputs();
}

std::size_t AutoencoderParams::latent_dim() const {
  return encoder.empty() ? 0 : encoder.back().outputs();
}

void AutoencoderParams::validate() const {
  if (encoder.empty() || decoder.empty())
    throw ShapeError("autoencoder: encoder and decoder need at least one layer each");
  auto check_chain = [](const std::vector<DenseLayer>& layers, const char* half) {
    for (std::size_t i = 0; i < layers.size(); ++i) {
      const DenseLayer& l = layers[i];
      if (l.weights.rank() != 2 || l.bias.rank() != 1 || l.bias.size() != l.outputs())
        throw ShapeError(std::string("autoencoder ") + half + " layer " + std::to_string(i) +
                         ": weights " + to_string(l.weights.shape()) + ", bias " +
                         to_string(l.bias.shape()));
      if (i > 0 && layers[i - 1].outputs() != l.inputs())
        throw ShapeError(std::string("autoencoder ") + half + " layer " + std::to_string(i) +
                         " expects " + std::to_string(l.inputs()) + " inputs, previous layer gives " +
                         std::to_string(layers[i - 1].outputs()));
    }
  };
  check_chain(encoder, "encoder");
  check_chain(decoder, "decoder");
  if (decoder.front().inputs() != latent_dim())
    throw ShapeError("autoencoder: decoder input " + std::to_string(decoder.front().inputs()) +
                     " != latent dim " + std::to_string(latent_dim()));
  if (decoder.back().outputs() != input_dim())
    throw ShapeError("autoencoder: decoder output " + std::to_string(decoder.back().outputs()) +
                     " != input dim " + std::to_string(input_dim()));
}

AutoencoderParams make_autoencoder(std::size_t input_dim, const std::vector<std::size_t>& sizes,
                                   std::uint64_t seed) {
  if (input_dim < 1) throw InvalidArgument("make_autoencoder: input dim must be >= 1");
  if (sizes.empty()) throw InvalidArgument("make_autoencoder: need at least one layer size");
  for (std::size_t s : sizes)
    if (s < 1) throw InvalidArgument("make_autoencoder: layer sizes must be >= 1");

  Rng rng(seed);
  AutoencoderParams ae;
  std::size_t in = input_dim;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    const auto act = i + 1 == sizes.size() ? Activation::Linear : Activation::Relu;
    ae.encoder.push_back(glorot_layer(in, sizes[i], act, rng));
    in = sizes[i];
  }
  for (std::size_t i = sizes.size(); i-- > 0;) {
    const std::size_t out = i == 0 ? input_dim : sizes[i - 1];
    const auto act = i == 0 ? Activation::Linear : Activation::Relu;
    ae.decoder.push_back(glorot_layer(in, out, act, rng));
    in = out;
  }
  return ae;
}

std::vector<double> encode(const AutoencoderParams& params, std::span<const double> x) {
  return encode(params, as_row(x)).values();
}

std::vector<double> decode(const AutoencoderParams& params, std::span<const double> z) {
  return decode(params, as_row(z)).values();
}

Tensor encode(const AutoencoderParams& params, const Tensor& X) {
  return apply_layers(params.encoder, X);
}

Tensor decode(const AutoencoderParams& params, const Tensor& Z) {
  return apply_layers(params.decoder, Z);
}

ReconstructionFeatures reconstruction_features(std::span<const double> x,
                                               std::span<const double> x_hat) {
  if (x.size() != x_hat.size())
    throw ShapeError("reconstruction_features: lengths " + std::to_string(x.size()) + " and " +
                     std::to_string(x_hat.size()));
  ReconstructionFeatures f;
  for (std::size_t i = 0; i < x.size(); ++i) f.euc += (x[i] - x_hat[i]) * (x[i] - x_hat[i]);
  const double nx = std::sqrt(squared_norm(x)), nh = std::sqrt(squared_norm(x_hat));
  if (nx > 0.0 && nh > 0.0) f.cos = std::clamp(dot(x, x_hat) / (nx * nh), -1.0, 1.0);
  return f;
}

double laddm_loss(std::span<const double> x, std::span<const double> x_hat, double density,
                  double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw InvalidArgument("laddm_loss: alpha must be in [0, 1]");
  if (!(density >= 0.0)) throw InvalidArgument("laddm_loss: density must be >= 0");
  const double euc = reconstruction_features(x, x_hat).euc;
  return (1.0 - alpha) * euc - alpha * std::log(std::max(density, ad::kLogFloor));
}

std::string_view aff_input_name(AffInput mode) {
  return mode == AffInput::Latent ? "latent" : "augmented";
}

AffInput parse_aff_input(std::string_view name) {
  if (name == "latent") return AffInput::Latent;
  if (name == "augmented") return AffInput::Augmented;
  throw InvalidArgument("unknown aff input '" + std::string(name) +
                        "', expected latent or augmented");
}

Tensor density_inputs(const AutoencoderParams& params, const Tensor& X, AffInput mode) {
  Tensor Z = encode(params, X);
  if (mode == AffInput::Latent) return Z;
  const Tensor Xh = decode(params, Z);
  const std::size_t p = Z.cols();
  Tensor O(Shape{X.rows(), p + 2});
  for (std::size_t r = 0; r < X.rows(); ++r) {
    auto o = O.row(r);
    std::copy(Z.row(r).begin(), Z.row(r).end(), o.begin());
    const auto f = reconstruction_features(X.row(r), Xh.row(r));
    o[p] = f.euc;
    o[p + 1] = f.cos;
  }
  return O;
}

std::vector<double> reconstruction_errors(const AutoencoderParams& params, const Tensor& X) {
  const Tensor Xh = decode(params, encode(params, X));
  std::vector<double> out(X.rows());
  for (std::size_t r = 0; r < X.rows(); ++r)
    out[r] = reconstruction_features(X.row(r), Xh.row(r)).euc;
  return out;
}

AutoencoderTrainResult train_autoencoder(const AutoencoderParams& init, const Tensor& X,
                                         const AutoencoderTrainOptions& options) {
  init.validate();
  if (X.rank() != 2 || X.rows() == 0) throw InvalidArgument("train_autoencoder: no data");
  if (X.cols() != init.input_dim())
    throw ShapeError("train_autoencoder: data dim " + std::to_string(X.cols()) +
                     " != autoencoder input dim " + std::to_string(init.input_dim()));
  if (options.batch_size < 1) throw InvalidArgument("train_autoencoder: batch_size must be >= 1");

  AutoencoderTrainResult result;
  result.params = init;
  result.initial_loss = mean_of(reconstruction_errors(init, X));
  result.best_loss = result.initial_loss;
  if (options.epochs == 0 || options.lr == 0.0) return result;

  AutoencoderParams ae = init;
  const auto params = parameter_tensors(ae);
  Adam adam(options.lr);
  Rng rng(options.seed);
  std::vector<std::size_t> order(X.rows());
  std::iota(order.begin(), order.end(), std::size_t{0});
  double last_finite = result.initial_loss;

  for (std::size_t epoch = 1; epoch <= options.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t begin = 0; begin < order.size(); begin += options.batch_size) {
      const std::size_t end = std::min(begin + options.batch_size, order.size());
      ad::Graph g;
      auto x = g.constant(X.rows_subset(std::span(order.data() + begin, end - begin)));
      const auto enc = bind_layers(g, ae.encoder);
      const auto dec = bind_layers(g, ae.decoder);
      auto loss = ad::mean(ad::row_squared_norm(x - run_layers(run_layers(x, enc), dec)));
      try {
        last_finite = g.forward(loss).item();
      } catch (const NonFiniteError&) {
        throw DivergenceError("train_autoencoder: non-finite loss in epoch " +
                                  std::to_string(epoch),
                              last_finite);
      }
      const auto grads = g.backward(loss);
      std::vector<const Tensor*> gs;
      append_gradients(grads, enc, gs);
      append_gradients(grads, dec, gs);
      adam.step(params, gs);
    }
    if (!all_finite(params))
      throw DivergenceError("train_autoencoder: parameters diverged in epoch " +
                                std::to_string(epoch),
                            last_finite);
    const double loss = mean_of(reconstruction_errors(ae, X));
    result.history.push_back(loss);
    if (loss < result.best_loss) {
      result.best_loss = loss;
      result.best_epoch = epoch;
      result.params = ae;
    }
  }
  return result;
}

void LaddmConfig::validate() const {
  if (encoder_sizes.empty()) throw InvalidArgument("laddm: encoder sizes must not be empty");
  for (std::size_t s : encoder_sizes)
    if (s < 1) throw InvalidArgument("laddm: encoder sizes must be >= 1");
  if (!(gamma > 0.0)) throw InvalidArgument("laddm: gamma must be > 0");
  if (features < 1) throw InvalidArgument("laddm: features must be >= 1");
  if (rank < 1 || rank > features) throw InvalidArgument("laddm: rank must be in [1, features]");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw InvalidArgument("laddm: alpha must be in [0, 1]");
  if (!(lr >= 0.0)) throw InvalidArgument("laddm: lr must be >= 0");
  if (batch_size < 1) throw InvalidArgument("laddm: batch_size must be >= 1");
}

LaddmGraph build_laddm_graph(ad::Graph& graph, const Tensor& batch, const AutoencoderParams& ae,
                             const FourierFeatureMap& map, const Tensor& eigenvectors,
                             const Tensor& logits, double normalization, double alpha,
                             AffInput mode) {
  LaddmGraph lg;
  auto x = graph.constant(batch);
  lg.encoder = bind_layers(graph, ae.encoder);
  lg.decoder = bind_layers(graph, ae.decoder);
  lg.eigenvectors = graph.variable(eigenvectors);
  lg.logits = graph.variable(logits);

  auto z = run_layers(x, lg.encoder);
  auto x_hat = run_layers(z, lg.decoder);
  lg.reconstruction = ad::row_squared_norm(x - x_hat);
  auto o = mode == AffInput::Latent
               ? z
               : ad::concat({z, lg.reconstruction, ad::row_cosine_similarity(x, x_hat)});
  auto W = graph.constant(map.weights);
  auto b = graph.constant(Tensor::vector(map.phases));
  const double amp = std::sqrt(2.0 / static_cast<double>(map.features()));
  auto phi = ad::scale(ad::cos(ad::matmul_t(o, W) + b), amp);
  auto unit = ad::div_rows(phi, ad::row_l2_norm(phi));
  lg.densities = projected_density(unit, lg.eigenvectors, ad::softmax(lg.logits), normalization);
  lg.loss = ad::scale(ad::mean(lg.reconstruction), 1.0 - alpha) -
            ad::scale(ad::mean(ad::log(lg.densities)), alpha);
  return lg;
}

double laddm_training_loss(const LaddmModel& model, const Tensor& X, double alpha) {
  const auto dens = score_laddm(model, X);
  const auto euc = reconstruction_errors(model.autoencoder, X);
  double s = 0.0;
  for (std::size_t i = 0; i < dens.size(); ++i)
    s += (1.0 - alpha) * euc[i] - alpha * std::log(std::max(dens[i], ad::kLogFloor));
  return s / static_cast<double>(dens.size());
}

std::vector<double> score_laddm(const LaddmModel& model, const Tensor& X) {
  const Tensor F = normalized_feature_map(model.feature_map,
                                          density_inputs(model.autoencoder, X, model.aff_input));
  return estimate_densities(model.density, F);
}

LaddmTrainResult train_laddm(const Tensor& X, const LaddmConfig& config) {
  config.validate();
  if (X.rank() != 2 || X.rows() < 2) throw InvalidArgument("train_laddm: need at least 2 samples");

  const std::size_t latent = config.encoder_sizes.back();
  const std::size_t aff_dim = config.aff_input == AffInput::Latent ? latent : latent + 2;
  const bool train = config.epochs > 0;

  LaddmModel model;
  model.aff_input = config.aff_input;
  model.autoencoder = make_autoencoder(X.cols(), config.encoder_sizes, derive_seed(config.seed, 0));
  if (train && config.warmup_epochs > 0) {
    AutoencoderTrainOptions warm{config.warmup_epochs, config.lr, config.batch_size,
                                 derive_seed(config.seed, 1)};
    model.autoencoder = train_autoencoder(model.autoencoder, X, warm).params;
  }

  model.feature_map =
      sample_rff(aff_dim, config.features, config.gamma, derive_seed(config.seed, 2));
  if (train) {
    AffOptions aff = config.aff;
    aff.seed = derive_seed(config.seed, 3);
    model.feature_map =
        train_aff(model.feature_map, density_inputs(model.autoencoder, X, config.aff_input),
                  config.gamma, aff)
            .map;
  }

  const double M = normalization_constant({config.gamma, aff_dim});
  model.density = fit_density_model(
      normalized_feature_map(model.feature_map,
                             density_inputs(model.autoencoder, X, config.aff_input)),
      std::min(config.rank, config.features), M);

  LaddmTrainResult result;
  result.model = model;
  result.initial_loss = laddm_training_loss(model, X, config.alpha);
  result.best_loss = result.initial_loss;
  if (!train || config.lr == 0.0) return result;

  AutoencoderParams ae = model.autoencoder;
  Tensor V = model.density.eigenvectors;
  Tensor logits = eigenvalue_logits(model.density);
  auto params = parameter_tensors(ae);
  params.push_back(&V);
  params.push_back(&logits);

  Adam adam(config.lr);
  Rng rng(derive_seed(config.seed, 4));
  std::vector<std::size_t> order(X.rows());
  std::iota(order.begin(), order.end(), std::size_t{0});
  double last_finite = result.initial_loss;

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t begin = 0; begin < order.size(); begin += config.batch_size) {
      const std::size_t end = std::min(begin + config.batch_size, order.size());
      ad::Graph g;
      const Tensor batch = X.rows_subset(std::span(order.data() + begin, end - begin));
      const LaddmGraph lg = build_laddm_graph(g, batch, ae, model.feature_map, V, logits,
                                              model.density.normalization, config.alpha,
                                              config.aff_input);
      try {
        last_finite = g.forward(lg.loss).item();
      } catch (const NonFiniteError& e) {
        throw DivergenceError("train_laddm: non-finite loss in epoch " + std::to_string(epoch) +
                                  " (" + e.what() + ")",
                              last_finite);
      }
      const auto grads = g.backward(lg.loss);
      std::vector<const Tensor*> gs;
      append_gradients(grads, lg.encoder, gs);
      append_gradients(grads, lg.decoder, gs);
      gs.push_back(&grads[lg.eigenvectors]);
      gs.push_back(&grads[lg.logits]);
      adam.step(params, gs);
      normalize_eigenvector_rows(V);
    }
    if (!all_finite(params))
      throw DivergenceError("train_laddm: parameters diverged in epoch " + std::to_string(epoch),
                            last_finite);

    LaddmModel candidate{ae, model.feature_map,
                         sorted_density_model(V, simplex_weights(logits.data()),
                                              model.density.normalization),
                         config.aff_input};
    const double loss = laddm_training_loss(candidate, X, config.alpha);
    if (!std::isfinite(loss))
      throw DivergenceError("train_laddm: non-finite training loss in epoch " +
                                std::to_string(epoch),
                            last_finite);
    result.loss_history.push_back(loss);
    if (loss < result.best_loss) {
      result.best_loss = loss;
      result.best_epoch = epoch;
      result.model = std::move(candidate);
    }
    result.best_history.push_back(result.best_loss);
  }
  return result;
}

}  // namespace addm
