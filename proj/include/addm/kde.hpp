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
#include <span>
#include <vector>

#include "addm/tensor.hpp"

namespace addm {

/// Gaussian kernel exp(-gamma |x - y|^2) on R^dim.
struct GaussianKernelParams {
  double gamma = 1.0;
  std::size_t dim = 1;

  void validate() const;
};

double gaussian_kernel(std::span<const double> x, std::span<const double> y,
                       const GaussianKernelParams& params);

/// M_gamma = (pi / gamma)^(dim / 2), the integral of exp(-gamma |u|^2) over R^dim.
/// Dividing the kernel by it yields a probability density.
double normalization_constant(const GaussianKernelParams& params);

/// Parzen estimate (1 / (N M_gamma)) sum_i k(x_i, x). `train` holds one point per row.
double kde_estimate(const Tensor& train, std::span<const double> x,
                    const GaussianKernelParams& params);

/// kde_estimate for every row of `queries`.
std::vector<double> kde_estimate(const Tensor& train, const Tensor& queries,
                                 const GaussianKernelParams& params);

}  // namespace addm
