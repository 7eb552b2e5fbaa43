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

#include "addm/kde.hpp"

#include <cmath>
#include <numbers>

#include "addm/batch_kernels.hpp"
#include "addm/error.hpp"

namespace addm {

void GaussianKernelParams::validate() const {
  if (!(gamma > 0.0) || !std::isfinite(gamma))
    throw InvalidArgument("gaussian kernel: gamma must be > 0, got " + std::to_string(gamma));
  if (dim < 1) throw InvalidArgument("gaussian kernel: dim must be >= 1");
}

double gaussian_kernel(std::span<const double> x, std::span<const double> y,
                       const GaussianKernelParams& params) {
  params.validate();
  if (x.size() != params.dim || y.size() != params.dim)
    throw ShapeError("gaussian_kernel: expected dim " + std::to_string(params.dim) + ", got " +
                     std::to_string(x.size()) + " and " + std::to_string(y.size()));
  double d2 = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double t = x[k] - y[k];
    d2 += t * t;
  }
  return std::exp(-params.gamma * d2);
}

double normalization_constant(const GaussianKernelParams& params) {
  params.validate();
  return std::pow(std::numbers::pi / params.gamma, static_cast<double>(params.dim) / 2.0);
}

double kde_estimate(const Tensor& train, std::span<const double> x,
                    const GaussianKernelParams& params) {
  Tensor query(Shape{1, x.size()}, std::vector<double>(x.begin(), x.end()));
  return kde_estimate(train, query, params).front();
}

std::vector<double> kde_estimate(const Tensor& train, const Tensor& queries,
                                 const GaussianKernelParams& params) {
  params.validate();
  if (train.rank() != 2 || train.rows() == 0)
    throw InvalidArgument("kde_estimate: empty training set");
  if (train.cols() != params.dim || queries.cols() != params.dim)
    throw ShapeError("kde_estimate: expected dim " + std::to_string(params.dim) + ", train " +
                     to_string(train.shape()) + ", queries " + to_string(queries.shape()));
  return kernels::kde_densities(train, queries, params.gamma, normalization_constant(params));
}

}  // namespace addm
