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

#include "addm/density_matrix.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "addm/batch_kernels.hpp"
#include "addm/error.hpp"
#include "addm/optimizer.hpp"
#include "addm/rng.hpp"

namespace addm {

namespace {

constexpr double kEigenFloor = 1e-12;

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Eigen::Map<const RowMatrix> as_eigen(const Tensor& t) {
  return {t.data().data(), static_cast<Eigen::Index>(t.rows()),
          static_cast<Eigen::Index>(t.cols())};
}

// Eigenpairs of a symmetric matrix, descending, ties in solver order.
struct SortedEigen {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;  // columns
  std::vector<Eigen::Index> order;
};

SortedEigen symmetric_eigen(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
  if (solver.info() != Eigen::Success)
    throw Error("spectral decomposition: eigensolver did not converge");
  SortedEigen out{solver.eigenvalues(), solver.eigenvectors(), {}};
  out.order.resize(static_cast<std::size_t>(m.rows()));
  std::iota(out.order.begin(), out.order.end(), Eigen::Index{0});
  std::stable_sort(out.order.begin(), out.order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return out.values[a] > out.values[b];
  });
  return out;
}

// Deterministic sign: the largest-magnitude entry is positive.
void fix_sign(std::span<double> v) {
  std::size_t arg = 0;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (std::abs(v[i]) > std::abs(v[arg])) arg = i;
  if (v[arg] < 0.0)
    for (double& x : v) x = -x;
}

void check_unit_rows(const Tensor& F, double tol, const char* where) {
  for (std::size_t i = 0; i < F.rows(); ++i) {
    const double n = std::sqrt(squared_norm(F.row(i)));
    if (std::abs(n - 1.0) > tol)
      throw InvalidArgument(std::string(where) + ": feature row " + std::to_string(i) +
                            " has norm " + std::to_string(n) + ", expected 1");
  }
}

}  // namespace

void DensityMatrixModel::validate() const {
  if (eigenvectors.rank() != 2 || eigenvectors.rows() != eigenvalues.size())
    throw ShapeError("DensityMatrixModel: eigenvectors " + to_string(eigenvectors.shape()) +
                     " vs " + std::to_string(eigenvalues.size()) + " eigenvalues");
  if (rank() > features()) throw ShapeError("DensityMatrixModel: rank exceeds feature count");
  for (double l : eigenvalues)
    if (!(l >= 0.0)) throw InvalidArgument("DensityMatrixModel: negative eigenvalue");
  if (!(normalization > 0.0)) throw InvalidArgument("DensityMatrixModel: normalization <= 0");
}

Tensor build_density_matrix(const Tensor& unit_features) {
  if (unit_features.rank() != 2 || unit_features.rows() == 0)
    throw InvalidArgument("build_density_matrix: need at least one feature vector");
  check_unit_rows(unit_features, 1e-8, "build_density_matrix");
  return kernels::density_matrix(unit_features);
}

Spectrum spectral_decompose(const Tensor& rho, std::size_t rank) {
  if (rho.rank() != 2 || rho.rows() != rho.cols())
    throw ShapeError("spectral_decompose: expected a square matrix, got " +
                     to_string(rho.shape()));
  const std::size_t D = rho.rows();
  if (rank < 1 || rank > D)
    throw InvalidArgument("spectral_decompose: rank must be in [1, " + std::to_string(D) + "]");
  for (std::size_t i = 0; i < D; ++i)
    for (std::size_t j = i + 1; j < D; ++j)
      if (std::abs(rho(i, j) - rho(j, i)) > 1e-8)
        throw InvalidArgument("spectral_decompose: matrix is not symmetric at (" +
                              std::to_string(i) + ", " + std::to_string(j) + ")");

  const SortedEigen eig = symmetric_eigen(as_eigen(rho));
  Spectrum out{Tensor(Shape{rank, D}), std::vector<double>(rank)};
  for (std::size_t k = 0; k < rank; ++k) {
    const Eigen::Index c = eig.order[k];
    const double value = eig.values[c];
    out.values[k] = value < kEigenFloor ? 0.0 : value;
    auto row = out.vectors.row(k);
    for (std::size_t j = 0; j < D; ++j) row[j] = eig.vectors(static_cast<Eigen::Index>(j), c);
    fix_sign(row);
  }
  return out;
}

DensityMatrixModel fit_density_model(const Tensor& unit_features, std::size_t rank,
                                     double normalization) {
  if (unit_features.rank() != 2 || unit_features.rows() == 0)
    throw InvalidArgument("fit_density_model: need at least one feature vector");
  const std::size_t N = unit_features.rows(), D = unit_features.cols();
  if (rank < 1 || rank > D)
    throw InvalidArgument("fit_density_model: rank must be in [1, " + std::to_string(D) + "]");
  check_unit_rows(unit_features, 1e-8, "fit_density_model");

  DensityMatrixModel model;
  model.normalization = normalization;
  if (N >= D) {
    Spectrum s = spectral_decompose(kernels::density_matrix(unit_features), rank);
    model.eigenvectors = std::move(s.vectors);
    model.eigenvalues = std::move(s.values);
    return model;
  }

  // rho = F^T F / N shares its non-zero spectrum with G = F F^T / N; an
  // eigenvector u of G maps to F^T u / sqrt(N mu).
  const Tensor G = kernels::gram_matrix(unit_features);
  const SortedEigen eig = symmetric_eigen(as_eigen(G));
  const auto F = as_eigen(unit_features);
  std::vector<double> values;
  std::vector<double> rows;
  for (std::size_t k = 0; k < std::min(rank, N); ++k) {
    const Eigen::Index c = eig.order[k];
    const double mu = eig.values[c];
    if (mu < kEigenFloor) break;
    Eigen::VectorXd v = F.transpose() * eig.vectors.col(c);
    v /= std::sqrt(static_cast<double>(N) * mu);
    std::vector<double> row(v.data(), v.data() + v.size());
    fix_sign(row);
    rows.insert(rows.end(), row.begin(), row.end());
    values.push_back(mu);
  }
  model.eigenvectors = Tensor(Shape{values.size(), D}, std::move(rows));
  model.eigenvalues = std::move(values);
  return model;
}

double estimate_density(const DensityMatrixModel& model, std::span<const double> unit_phi) {
  if (unit_phi.size() != model.features())
    throw ShapeError("estimate_density: expected " + std::to_string(model.features()) +
                     " features, got " + std::to_string(unit_phi.size()));
  const double n = std::sqrt(squared_norm(unit_phi));
  if (std::abs(n - 1.0) > 1e-6)
    throw InvalidArgument("estimate_density: query has norm " + std::to_string(n) +
                          ", expected 1");
  Tensor F(Shape{1, unit_phi.size()}, std::vector<double>(unit_phi.begin(), unit_phi.end()));
  return kernels::projected_densities(F, model.eigenvectors, model.eigenvalues,
                                      model.normalization)
      .front();
}

std::vector<double> estimate_densities(const DensityMatrixModel& model,
                                       const Tensor& unit_features) {
  return kernels::projected_densities(unit_features, model.eigenvectors, model.eigenvalues,
                                      model.normalization);
}

double mean_log_likelihood(const DensityMatrixModel& model, const Tensor& unit_features) {
  const auto dens = estimate_densities(model, unit_features);
  if (dens.empty()) throw InvalidArgument("mean_log_likelihood: no samples");
  double s = 0.0;
  for (double f : dens) s += std::log(std::max(f, ad::kLogFloor));
  return s / static_cast<double>(dens.size());
}

ad::Var projected_density(ad::Var features, ad::Var eigenvectors, ad::Var weights,
                          double normalization) {
  auto proj = ad::matmul_t(features, eigenvectors);
  return ad::scale(ad::row_sum(ad::square(proj) * weights), 1.0 / normalization);
}

DensityMatrixModel sorted_density_model(const Tensor& eigenvectors,
                                        std::span<const double> weights, double normalization) {
  if (eigenvectors.rows() != weights.size())
    throw ShapeError("sorted_density_model: " + std::to_string(eigenvectors.rows()) +
                     " eigenvectors vs " + std::to_string(weights.size()) + " weights");
  std::vector<std::size_t> order(weights.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return weights[a] > weights[b]; });
  DensityMatrixModel m;
  m.normalization = normalization;
  m.eigenvectors = eigenvectors.rows_subset(order);
  for (std::size_t k : order) m.eigenvalues.push_back(weights[k]);
  return m;
}

Tensor eigenvalue_logits(const DensityMatrixModel& model) {
  Tensor logits(Shape{model.rank()});
  for (std::size_t k = 0; k < model.rank(); ++k)
    logits[k] = std::log(std::max(model.eigenvalues[k], ad::kLogFloor));
  return logits;
}

std::vector<double> simplex_weights(std::span<const double> logits) {
  if (logits.empty()) return {};
  const double peak = *std::max_element(logits.begin(), logits.end());
  std::vector<double> w(logits.size());
  double z = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k) z += (w[k] = std::exp(logits[k] - peak));
  for (double& v : w) v /= z;
  return w;
}

void normalize_eigenvector_rows(Tensor& eigenvectors) {
  for (std::size_t k = 0; k < eigenvectors.rows(); ++k) {
    auto row = eigenvectors.row(k);
    const double n = std::sqrt(squared_norm(row));
    if (n > 0.0)
      for (double& x : row) x /= n;
  }
}

MleResult train_mle(const DensityMatrixModel& model, const Tensor& unit_features,
                    const MleOptions& options) {
  model.validate();
  if (unit_features.rank() != 2 || unit_features.rows() == 0)
    throw InvalidArgument("train_mle: no training features");
  if (unit_features.cols() != model.features())
    throw ShapeError("train_mle: feature dim " + std::to_string(unit_features.cols()) +
                     " != model dim " + std::to_string(model.features()));
  if (options.batch_size < 1) throw InvalidArgument("train_mle: batch_size must be >= 1");

  MleResult result;
  result.model = model;
  result.initial_log_likelihood = mean_log_likelihood(model, unit_features);
  result.best_log_likelihood = result.initial_log_likelihood;
  if (options.epochs == 0 || options.lr == 0.0) return result;

  Tensor logits = eigenvalue_logits(model);
  Tensor V = model.eigenvectors;
  auto simplex = [](const Tensor& theta) { return simplex_weights(theta.data()); };
  auto track = [&](const std::vector<double>& w) {
    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    result.max_simplex_error = std::max(result.max_simplex_error, std::abs(total - 1.0));
    result.min_eigenvalue = std::min(result.min_eigenvalue, *std::min_element(w.begin(), w.end()));
  };

  // Renormalizing lambda onto the simplex can only raise the likelihood, so
  // the start point is the first checkpoint.
  {
    const auto w = simplex(logits);
    track(w);
    DensityMatrixModel start = sorted_density_model(V, w, model.normalization);
    const double ll = mean_log_likelihood(start, unit_features);
    if (ll >= result.best_log_likelihood) {
      result.best_log_likelihood = ll;
      result.model = std::move(start);
    }
  }

  Rng rng(options.seed);
  std::vector<std::size_t> order(unit_features.rows());
  std::iota(order.begin(), order.end(), std::size_t{0});
  double last_finite = result.initial_log_likelihood;

  for (std::size_t epoch = 1; epoch <= options.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t begin = 0; begin < order.size(); begin += options.batch_size) {
      const std::size_t end = std::min(begin + options.batch_size, order.size());
      const std::span<const std::size_t> idx(order.data() + begin, end - begin);
      ad::Graph g;
      auto f = g.constant(unit_features.rows_subset(idx));
      auto vv = g.variable(V);
      auto theta = g.variable(logits);
      auto dens = projected_density(f, vv, ad::softmax(theta), model.normalization);
      auto loss = ad::scale(ad::mean(ad::log(dens)), -1.0);
      try {
        last_finite = -g.forward(loss).item();
      } catch (const NonFiniteError&) {
        throw DivergenceError("train_mle: non-finite loss in epoch " + std::to_string(epoch),
                              last_finite);
      }
      const auto grads = g.backward(loss);
      sgd_step(V, grads[vv], options.lr);
      sgd_step(logits, grads[theta], options.lr);
      normalize_eigenvector_rows(V);
      track(simplex(logits));
    }
    if (!V.all_finite() || !logits.all_finite())
      throw DivergenceError("train_mle: parameters diverged in epoch " + std::to_string(epoch),
                            last_finite);
    DensityMatrixModel candidate = sorted_density_model(V, simplex(logits), model.normalization);
    const double ll = mean_log_likelihood(candidate, unit_features);
    result.history.push_back(ll);
    if (ll > result.best_log_likelihood) {
      result.best_log_likelihood = ll;
      result.best_epoch = epoch;
      result.model = std::move(candidate);
    }
  }
  return result;
}

}  // namespace addm
