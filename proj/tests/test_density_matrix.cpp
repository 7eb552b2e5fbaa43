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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <random>

#include "addm/batch_kernels.hpp"
#include "addm/density_matrix.hpp"
#include "addm/error.hpp"
#include "addm/fourier_features.hpp"
#include "addm/kde.hpp"
#include "oracles.hpp"

using namespace addm;

namespace {

Tensor random_density(std::size_t D, std::size_t N, std::mt19937_64& rng) {
  return build_density_matrix(oracle::random_unit_rows(N, D, rng));
}

double quadratic_form(const Tensor& rho, std::span<const double> v) {
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j) s += v[i] * rho(i, j) * v[j];
  return s;
}

double trace(const Tensor& m) {
  double t = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i) t += m(i, i);
  return t;
}

}  // namespace

TEST_CASE("density matrix of a single unit vector") {
  const Tensor u = Tensor::matrix({{0.6, 0.0, 0.8}});
  const Tensor rho = build_density_matrix(u);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) CHECK(rho(i, j) == doctest::Approx(u(0, i) * u(0, j)));
  CHECK(trace(rho) == doctest::Approx(1.0).epsilon(1e-15));
  const auto s = spectral_decompose(rho, 3);
  CHECK(s.values[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(s.values[1] == 0.0);
  CHECK(s.values[2] == 0.0);
  CHECK(std::abs(s.vectors(0, 0)) == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(std::abs(s.vectors(0, 2)) == doctest::Approx(0.8).epsilon(1e-12));
}

TEST_CASE("two orthonormal vectors give eigenvalues one half") {
  const Tensor rho = build_density_matrix(Tensor::matrix({{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}}));
  const auto s = spectral_decompose(rho, 3);
  CHECK(s.values[0] == doctest::Approx(0.5));
  CHECK(s.values[1] == doctest::Approx(0.5));
  CHECK(s.values[2] == 0.0);
}

TEST_CASE("density matrix is symmetric, trace one and PSD") {
  std::mt19937_64 rng(16);
  const Tensor rho = random_density(16, 50, rng);
  CHECK(trace(rho) == doctest::Approx(1.0).epsilon(1e-10));
  for (std::size_t i = 0; i < 16; ++i)
    for (std::size_t j = 0; j < 16; ++j) CHECK(rho(i, j) == rho(j, i));
  const auto eig = oracle::jacobi(oracle::to_matrix(rho));
  CHECK(eig.values.front() >= -1e-12);
}

TEST_CASE("build_density_matrix rejects non-unit rows by index") {
  Tensor F = Tensor::matrix({{1.0, 0.0}, {0.0, 1.0}, {0.5, 0.5}});
  try {
    build_density_matrix(F);
    FAIL("expected InvalidArgument");
  } catch (const InvalidArgument& e) {
    CHECK(std::string(e.what()).find("row 2") != std::string::npos);
  }
  CHECK_THROWS_AS(build_density_matrix(Tensor(Shape{0, 2})), InvalidArgument);
}

TEST_CASE("density matrix is independent of row order") {
  std::mt19937_64 rng(17);
  const Tensor F = oracle::random_unit_rows(60, 12, rng);
  std::vector<std::size_t> perm(60);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::shuffle(perm.begin(), perm.end(), rng);
  const Tensor a = build_density_matrix(F), b = build_density_matrix(F.rows_subset(perm));
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i] - b[i]) <= 1e-12);
}

TEST_CASE("spectral decomposition of the isotropic matrix") {
  const std::size_t D = 6;
  Tensor rho(Shape{D, D});
  for (std::size_t i = 0; i < D; ++i) rho(i, i) = 1.0 / D;
  const auto s = spectral_decompose(rho, D);
  for (double v : s.values) CHECK(v == doctest::Approx(1.0 / D).epsilon(1e-12));
}

TEST_CASE("full-rank decomposition reconstructs rho and agrees with Jacobi") {
  std::mt19937_64 rng(18);
  const Tensor rho = random_density(16, 40, rng);
  const auto s = spectral_decompose(rho, 16);
  double worst = 0.0;
  for (std::size_t i = 0; i < 16; ++i)
    for (std::size_t j = 0; j < 16; ++j) {
      double r = 0.0;
      for (std::size_t k = 0; k < 16; ++k) r += s.vectors(k, i) * s.values[k] * s.vectors(k, j);
      worst = std::max(worst, std::abs(r - rho(i, j)));
    }
  CHECK(worst < 1e-8);

  const auto eig = oracle::jacobi(oracle::to_matrix(rho));
  for (std::size_t k = 0; k < 16; ++k) {
    CHECK(s.values[k] == doctest::Approx(std::max(eig.values[15 - k], 0.0)).epsilon(1e-9));
    if (k > 0) CHECK(s.values[k - 1] >= s.values[k]);
  }
  // Orthonormal rows.
  for (std::size_t a = 0; a < 16; ++a)
    for (std::size_t b = 0; b < 16; ++b)
      CHECK(dot(s.vectors.row(a), s.vectors.row(b)) ==
            doctest::Approx(a == b ? 1.0 : 0.0).epsilon(1e-8));
}

TEST_CASE("spectral_decompose errors") {
  Tensor asym = Tensor::matrix({{1.0, 0.2}, {0.0, 1.0}});
  CHECK_THROWS_AS(spectral_decompose(asym, 2), InvalidArgument);
  CHECK_THROWS_AS(spectral_decompose(Tensor(Shape{2, 3}), 1), ShapeError);
  Tensor eye = Tensor::matrix({{0.5, 0.0}, {0.0, 0.5}});
  CHECK_THROWS_AS(spectral_decompose(eye, 0), InvalidArgument);
  CHECK_THROWS_AS(spectral_decompose(eye, 3), InvalidArgument);
}

TEST_CASE("estimate_density examples") {
  DensityMatrixModel m;
  m.eigenvectors = Tensor::matrix({{0.6, 0.8, 0.0}});
  m.eigenvalues = {1.0};
  m.normalization = 2.5;
  CHECK(estimate_density(m, std::vector{0.6, 0.8, 0.0}) == doctest::Approx(1.0 / 2.5));
  CHECK(estimate_density(m, std::vector{-0.8, 0.6, 0.0}) == doctest::Approx(0.0));
  CHECK(estimate_density(m, std::vector{0.0, 0.0, 1.0}) == 0.0);
  CHECK_THROWS_AS(estimate_density(m, std::vector{1.0, 1.0, 0.0}), InvalidArgument);
  CHECK_THROWS_AS(estimate_density(m, std::vector{1.0, 0.0}), ShapeError);
}

TEST_CASE("full-rank estimates equal the dense quadratic form") {
  std::mt19937_64 rng(19);
  const Tensor F = oracle::random_unit_rows(40, 16, rng);
  const Tensor rho = build_density_matrix(F);
  const auto model = fit_density_model(F, 16, 1.7);
  const Tensor Q = oracle::random_unit_rows(100, 16, rng);
  const auto batch = estimate_densities(model, Q);
  const double lmax = model.eigenvalues.front();
  for (std::size_t q = 0; q < 100; ++q) {
    const double expected = quadratic_form(rho, Q.row(q)) / 1.7;
    CHECK(std::abs(batch[q] - expected) <= 1e-8 * std::abs(expected));
    CHECK(estimate_density(model, Q.row(q)) == batch[q]);
    CHECK(batch[q] >= 0.0);
    CHECK(batch[q] <= lmax / 1.7 * (1 + 1e-12));
  }
}

TEST_CASE("Gram route matches the explicit decomposition") {
  std::mt19937_64 rng(20);
  const Tensor F = oracle::random_unit_rows(10, 24, rng);
  const auto gram = fit_density_model(F, 24, 1.0);
  CHECK(gram.rank() == 10);
  const auto direct = spectral_decompose(build_density_matrix(F), 24);
  for (std::size_t k = 0; k < 10; ++k) {
    CHECK(gram.eigenvalues[k] == doctest::Approx(direct.values[k]).epsilon(1e-10));
    CHECK(std::abs(dot(gram.eigenvectors.row(k), direct.vectors.row(k))) ==
          doctest::Approx(1.0).epsilon(1e-8));
  }
  const Tensor Q = oracle::random_unit_rows(30, 24, rng);
  const Tensor rho = build_density_matrix(F);
  const auto est = estimate_densities(gram, Q);
  for (std::size_t q = 0; q < 30; ++q)
    CHECK(est[q] == doctest::Approx(quadratic_form(rho, Q.row(q))).epsilon(1e-8));
}

TEST_CASE("model invariants after construction") {
  std::mt19937_64 rng(22);
  for (std::size_t N : {8u, 40u}) {
    const auto m = fit_density_model(oracle::random_unit_rows(N, 16, rng), 6, 1.0);
    CHECK(m.rank() == 6);
    double total = 0.0;
    for (std::size_t k = 0; k < m.rank(); ++k) {
      CHECK(m.eigenvalues[k] >= 0.0);
      if (k > 0) CHECK(m.eigenvalues[k - 1] >= m.eigenvalues[k]);
      total += m.eigenvalues[k];
      for (std::size_t l = 0; l < m.rank(); ++l)
        CHECK(dot(m.eigenvectors.row(k), m.eigenvectors.row(l)) ==
              doctest::Approx(k == l ? 1.0 : 0.0).epsilon(1e-8));
    }
    CHECK(total <= 1.0 + 1e-10);
  }
}

TEST_CASE("rank agreement with the Parzen estimator") {
  std::mt19937_64 rng(23);
  std::normal_distribution<double> n(0.0, 1.0);
  Tensor train(Shape{100, 1});
  for (double& v : train.data()) v = n(rng);
  Tensor queries(Shape{50, 1});
  for (std::size_t i = 0; i < 50; ++i) queries(i, 0) = -3.0 + 6.0 * static_cast<double>(i) / 49.0;
  const double gamma = 1.0;
  const auto map = sample_rff(1, 8192, gamma, 24);
  const auto model = fit_density_model(normalized_feature_map(map, train), 8192,
                                       normalization_constant({gamma, 1}));
  const auto dm = estimate_densities(model, normalized_feature_map(map, queries));
  const auto kde = kde_estimate(train, queries, {gamma, 1});
  CHECK(oracle::spearman(dm, kde) > 0.95);
}

TEST_CASE("train_mle no-op cases") {
  std::mt19937_64 rng(25);
  const Tensor F = oracle::random_unit_rows(30, 8, rng);
  const auto m = fit_density_model(F, 4, 1.0);
  MleOptions opts;
  opts.lr = 0.0;
  auto r = train_mle(m, F, opts);
  CHECK(r.model.eigenvectors == m.eigenvectors);
  CHECK(r.model.eigenvalues == m.eigenvalues);
  opts = MleOptions{};
  opts.epochs = 0;
  r = train_mle(m, F, opts);
  CHECK(r.model.eigenvectors == m.eigenvectors);
  CHECK(r.model.eigenvalues == m.eigenvalues);
}

TEST_CASE("train_mle improves the likelihood and stays on the simplex") {
  std::mt19937_64 rng(26);
  std::normal_distribution<double> n(0.0, 0.3);
  Tensor F(Shape{200, 8});
  for (std::size_t i = 0; i < 200; ++i) {
    F(i, 0) = 1.0;
    for (std::size_t j = 1; j < 8; ++j) F(i, j) = n(rng);
  }
  F = kernels::normalize_rows(F);
  const auto init = fit_density_model(F, 4, 1.0);
  MleOptions opts;
  opts.epochs = 50;
  const auto r = train_mle(init, F, opts);
  CHECK(r.best_log_likelihood > r.initial_log_likelihood);
  CHECK(mean_log_likelihood(r.model, F) == doctest::Approx(r.best_log_likelihood));
  CHECK(r.best_log_likelihood >= r.initial_log_likelihood - 1e-9);
  CHECK(r.max_simplex_error <= 1e-8);
  CHECK(r.min_eigenvalue >= 0.0);
  double total = 0.0;
  for (double l : r.model.eigenvalues) total += l;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(std::is_sorted(r.model.eigenvalues.rbegin(), r.model.eigenvalues.rend()));
}

TEST_CASE("train_mle is deterministic") {
  std::mt19937_64 rng(27);
  const Tensor F = oracle::random_unit_rows(64, 10, rng);
  const auto init = fit_density_model(F, 5, 1.0);
  MleOptions opts;
  opts.epochs = 5;
  const auto a = train_mle(init, F, opts), b = train_mle(init, F, opts);
  CHECK(a.model.eigenvectors == b.model.eigenvectors);
  CHECK(a.model.eigenvalues == b.model.eigenvalues);
  CHECK(a.history == b.history);
}
