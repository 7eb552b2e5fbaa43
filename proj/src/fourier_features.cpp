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

#include "addm/fourier_features.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "addm/autodiff.hpp"
#include "addm/batch_kernels.hpp"
#include "addm/error.hpp"
#include "addm/kde.hpp"
#include "addm/optimizer.hpp"
#include "addm/rng.hpp"

namespace addm {

FourierFeatureMap sample_rff(std::size_t input_dim, std::size_t features, double gamma,
                             std::uint64_t seed) {
  if (input_dim < 1) throw InvalidArgument("sample_rff: input dimension must be >= 1");
  if (features < 1) throw InvalidArgument("sample_rff: feature count must be >= 1");
  if (!(gamma > 0.0)) throw InvalidArgument("sample_rff: gamma must be > 0");

  Rng rng(seed);
  std::normal_distribution<double> freq(0.0, std::sqrt(2.0 * gamma));
  constexpr double two_pi = 2.0 * std::numbers::pi;
  std::uniform_real_distribution<double> phase(0.0, two_pi);

  FourierFeatureMap map;
  map.gamma = gamma;
  map.weights = Tensor(Shape{features, input_dim});
  for (double& w : map.weights.data()) w = freq(rng);
  map.phases.resize(features);
  for (double& b : map.phases) {
    b = phase(rng);
    if (b >= two_pi) b = 0.0;
  }
  return map;
}

std::vector<double> feature_map(const FourierFeatureMap& map, std::span<const double> x) {
  if (x.size() != map.input_dim())
    throw ShapeError("feature_map: expected input dim " + std::to_string(map.input_dim()) +
                     ", got " + std::to_string(x.size()));
  Tensor X(Shape{1, x.size()}, std::vector<double>(x.begin(), x.end()));
  return kernels::fourier_features(X, map.weights, map.phases).values();
}

Tensor feature_map(const FourierFeatureMap& map, const Tensor& X) {
  return kernels::fourier_features(X, map.weights, map.phases);
}

std::vector<double> normalize_features(std::span<const double> phi) {
  const double n = std::sqrt(squared_norm(phi));
  if (!(n > 0.0)) throw InvalidArgument("normalize_features: zero feature vector");
  std::vector<double> out(phi.begin(), phi.end());
  for (double& v : out) v /= n;
  return out;
}

Tensor normalized_feature_map(const FourierFeatureMap& map, const Tensor& X) {
  return kernels::normalize_rows(feature_map(map, X));
}

double kernel_mse(const FourierFeatureMap& map, const Tensor& left, const Tensor& right,
                  double gamma) {
  if (left.rows() == 0) throw InvalidArgument("kernel_mse: no pairs");
  if (!left.same_shape(right)) throw ShapeError("kernel_mse: pair tensors differ in shape");
  const Tensor fl = feature_map(map, left);
  const Tensor fr = feature_map(map, right);
  const GaussianKernelParams kp{gamma, left.cols()};
  double s = 0.0;
  for (std::size_t i = 0; i < left.rows(); ++i) {
    const double e = gaussian_kernel(left.row(i), right.row(i), kp) - dot(fl.row(i), fr.row(i));
    s += e * e;
  }
  return s / static_cast<double>(left.rows());
}

namespace {

struct PairSample {
  Tensor left, right;
  std::vector<double> target;
};

PairSample draw_pairs(const Tensor& data, std::size_t count, double gamma, Rng& rng) {
  std::uniform_int_distribution<std::size_t> pick(0, data.rows() - 1);
  std::vector<std::size_t> li(count), ri(count);
  for (std::size_t k = 0; k < count; ++k) {
    li[k] = pick(rng);
    ri[k] = pick(rng);
  }
  PairSample s{data.rows_subset(li), data.rows_subset(ri), std::vector<double>(count)};
  const GaussianKernelParams kp{gamma, data.cols()};
  for (std::size_t k = 0; k < count; ++k)
    s.target[k] = gaussian_kernel(s.left.row(k), s.right.row(k), kp);
  return s;
}

Tensor slice_rows(const Tensor& t, std::size_t begin, std::size_t end) {
  const std::size_t c = t.cols();
  std::vector<double> v(t.data().begin() + begin * c, t.data().begin() + end * c);
  return Tensor(Shape{end - begin, c}, std::move(v));
}

}  // namespace

AffResult train_aff(const FourierFeatureMap& init, const Tensor& data, double gamma,
                    const AffOptions& options) {
  if (data.rank() != 2 || data.rows() < 2)
    throw InvalidArgument("train_aff: need at least 2 data points");
  if (data.cols() != init.input_dim()) throw ShapeError("train_aff: data dim != map input dim");
  if (options.num_pairs < 1) throw InvalidArgument("train_aff: num_pairs must be >= 1");
  if (options.batch_size < 1) throw InvalidArgument("train_aff: batch_size must be >= 1");
  if (!(gamma > 0.0)) throw InvalidArgument("train_aff: gamma must be > 0");

  AffResult result{init, 0.0, 0.0, 0, {}};
  if (options.epochs == 0 || options.lr == 0.0) return result;

  Rng holdout_rng(derive_seed(options.seed, 0));
  const PairSample holdout =
      draw_pairs(data, std::max<std::size_t>(options.holdout_pairs, 1), gamma, holdout_rng);
  result.initial_mse = kernel_mse(init, holdout.left, holdout.right, gamma);
  result.best_mse = result.initial_mse;

  Rng rng(derive_seed(options.seed, 1));
  Tensor weights = init.weights;
  Tensor phases = Tensor::vector(init.phases);
  const double amp = std::sqrt(2.0 / static_cast<double>(init.features()));
  double last_finite = result.initial_mse;

  for (std::size_t epoch = 1; epoch <= options.epochs; ++epoch) {
    const PairSample train = draw_pairs(data, options.num_pairs, gamma, rng);
    for (std::size_t begin = 0; begin < options.num_pairs; begin += options.batch_size) {
      const std::size_t end = std::min(begin + options.batch_size, options.num_pairs);
      ad::Graph g;
      auto W = g.variable(weights);
      auto b = g.variable(phases);
      auto xl = g.constant(slice_rows(train.left, begin, end));
      auto xr = g.constant(slice_rows(train.right, begin, end));
      auto target = g.constant(Tensor::vector(
          std::vector<double>(train.target.begin() + begin, train.target.begin() + end)));
      auto fl = ad::scale(ad::cos(ad::matmul_t(xl, W) + b), amp);
      auto fr = ad::scale(ad::cos(ad::matmul_t(xr, W) + b), amp);
      auto loss = ad::mean(ad::square(ad::row_dot(fl, fr) - target));
      double value;
      try {
        value = g.forward(loss).item();
      } catch (const NonFiniteError&) {
        throw DivergenceError("train_aff: non-finite loss in epoch " + std::to_string(epoch),
                              last_finite);
      }
      last_finite = value;
      const auto grads = g.backward(loss);
      sgd_step(weights, grads[W], options.lr);
      sgd_step(phases, grads[b], options.lr);
    }
    if (!weights.all_finite() || !phases.all_finite())
      throw DivergenceError("train_aff: parameters diverged in epoch " + std::to_string(epoch),
                            last_finite);

    FourierFeatureMap candidate{weights, phases.values(), init.gamma};
    const double mse = kernel_mse(candidate, holdout.left, holdout.right, gamma);
    if (!std::isfinite(mse))
      throw DivergenceError("train_aff: non-finite held-out loss", last_finite);
    result.holdout_history.push_back(mse);
    if (mse < result.best_mse) {
      result.best_mse = mse;
      result.best_epoch = epoch;
      result.map = std::move(candidate);
    }
  }
  return result;
}

}  // namespace addm
