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

#include "addm/autodiff.hpp"
#include "addm/tensor.hpp"

namespace addm {

/// Low-rank density matrix rho ~ V^T diag(lambda) V together with the kernel
/// normalization constant used to turn quadratic forms into densities.
struct DensityMatrixModel {
  Tensor eigenvectors;              ///< r x D, one eigenvector per row
  std::vector<double> eigenvalues;  ///< r values, non-negative, descending
  double normalization = 1.0;       ///< M_gamma

  std::size_t rank() const noexcept { return eigenvalues.size(); }
  std::size_t features() const noexcept { return eigenvectors.cols(); }
  void validate() const;
};

/// rho = (1/N) sum_i f_i f_i^T over unit-norm rows f_i. Throws if a row is not
/// unit-norm within 1e-8, naming the row.
Tensor build_density_matrix(const Tensor& unit_features);

struct Spectrum {
  Tensor vectors;             ///< r x D
  std::vector<double> values; ///< r, descending
};

/// The `rank` largest eigenpairs of a symmetric matrix. Eigenvalues below
/// 1e-12 are clamped to zero; equal eigenvalues keep the solver's index order.
Spectrum spectral_decompose(const Tensor& rho, std::size_t rank);

/// Build the model straight from unit features. When N < D the eigenpairs come
/// from the N x N Gram matrix and rho is never formed; in that case at most
/// N pairs (the non-zero part of the spectrum) are kept.
DensityMatrixModel fit_density_model(const Tensor& unit_features, std::size_t rank,
                                     double normalization);

/// |diag(lambda)^(1/2) V phi|^2 / M for a unit-norm phi (checked within 1e-6).
double estimate_density(const DensityMatrixModel& model, std::span<const double> unit_phi);

/// estimate_density for every row; rows are not re-checked for unit norm.
std::vector<double> estimate_densities(const DensityMatrixModel& model,
                                       const Tensor& unit_features);

/// mean_i log(max(f(x_i), 1e-30))
double mean_log_likelihood(const DensityMatrixModel& model, const Tensor& unit_features);

/// Graph form of the estimator: sum_k w_k (V_k . f)^2 / M for every row of
/// `features`. Used by the likelihood training of both model variants.
ad::Var projected_density(ad::Var features, ad::Var eigenvectors, ad::Var weights,
                          double normalization);

/// Model with eigenpairs reordered by descending weight. Rows of V are used
/// as given.
DensityMatrixModel sorted_density_model(const Tensor& eigenvectors,
                                        std::span<const double> weights, double normalization);

/// log(max(lambda_k, 1e-30)); softmax of the result restores lambda / sum(lambda).
Tensor eigenvalue_logits(const DensityMatrixModel& model);

/// Numerically stable softmax.
std::vector<double> simplex_weights(std::span<const double> logits);

/// Rescale every non-zero row to unit length.
void normalize_eigenvector_rows(Tensor& eigenvectors);

struct MleOptions {
  std::size_t epochs = 50;
  double lr = 0.05;
  std::size_t batch_size = 64;
  std::uint64_t seed = 42;
};

struct MleResult {
  DensityMatrixModel model;
  double initial_log_likelihood = 0.0;  ///< at the input parameters
  double best_log_likelihood = 0.0;
  std::size_t best_epoch = 0;
  std::vector<double> history;          ///< mean log-likelihood after each epoch
  double max_simplex_error = 0.0;       ///< max |sum(lambda) - 1| over every step
  double min_eigenvalue = 1.0;          ///< min lambda_k over every step
};

/// Maximize the mean log-likelihood over (V, lambda). lambda = softmax(logits)
/// keeps the trace at one; rows of V are renormalized after each step. The
/// best model seen (the renormalized input included) is returned.
MleResult train_mle(const DensityMatrixModel& model, const Tensor& unit_features,
                    const MleOptions& options);

}  // namespace addm
