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

#include <cmath>
#include <random>

#include "addm/batch_kernels.hpp"
#include "addm/error.hpp"
#include "oracles.hpp"

using namespace addm;
namespace k = addm::kernels;

namespace {

struct Fixture {
  std::mt19937_64 rng{77};
  Tensor X = oracle::random_matrix(123, 5, rng);
  Tensor W = oracle::random_matrix(96, 5, rng);
  std::vector<double> phases;
  Tensor F;
  Tensor V = oracle::random_unit_rows(17, 96, rng);
  std::vector<double> lambda;

  Fixture() {
    std::uniform_real_distribution<double> u(0.0, 2.0 * M_PI);
    for (std::size_t j = 0; j < 96; ++j) phases.push_back(u(rng));
    F = k::serial::normalize_rows(k::serial::fourier_features(X, W, phases));
    for (std::size_t j = 0; j < 17; ++j) lambda.push_back(u(rng));
  }
};

}  // namespace

TEST_CASE_FIXTURE(Fixture, "parallel kernels are bit-identical to the serial reference") {
  CHECK(k::omp::fourier_features(X, W, phases) == k::serial::fourier_features(X, W, phases));
  CHECK(k::omp::normalize_rows(F) == k::serial::normalize_rows(F));
  CHECK(k::omp::density_matrix(F) == k::serial::density_matrix(F));
  CHECK(k::omp::gram_matrix(F) == k::serial::gram_matrix(F));
  CHECK(k::omp::projected_densities(F, V, lambda, 2.5) ==
        k::serial::projected_densities(F, V, lambda, 2.5));
  CHECK(k::omp::kde_densities(X, W, 0.4, 3.0) == k::serial::kde_densities(X, W, 0.4, 3.0));
}

TEST_CASE_FIXTURE(Fixture, "fourier features follow the cosine formula") {
  const Tensor phi = k::fourier_features(X, W, phases);
  const double amp = std::sqrt(2.0 / 96.0);
  for (std::size_t i = 0; i < X.rows(); i += 7)
    for (std::size_t j = 0; j < 96; j += 5) {
      double z = phases[j];
      for (std::size_t c = 0; c < 5; ++c) z += W(j, c) * X(i, c);
      CHECK(phi(i, j) == doctest::Approx(amp * std::cos(z)).epsilon(1e-13));
    }
}

TEST_CASE_FIXTURE(Fixture, "density and Gram matrices match direct sums") {
  const Tensor rho = k::density_matrix(F);
  const Tensor G = k::gram_matrix(F);
  const double n = static_cast<double>(F.rows());
  for (std::size_t a = 0; a < 96; a += 11)
    for (std::size_t b = 0; b < 96; b += 13) {
      double s = 0.0;
      for (std::size_t i = 0; i < F.rows(); ++i) s += F(i, a) * F(i, b);
      CHECK(rho(a, b) == doctest::Approx(s / n).epsilon(1e-12));
      CHECK(rho(a, b) == rho(b, a));
    }
  for (std::size_t a = 0; a < F.rows(); a += 9)
    for (std::size_t b = 0; b < F.rows(); b += 10) {
      double s = 0.0;
      for (std::size_t j = 0; j < 96; ++j) s += F(a, j) * F(b, j);
      CHECK(G(a, b) == doctest::Approx(s / n).epsilon(1e-12));
    }
}

TEST_CASE_FIXTURE(Fixture, "projected densities are weighted squared projections") {
  const auto dens = k::projected_densities(F, V, lambda, 2.5);
  for (std::size_t i = 0; i < F.rows(); i += 4) {
    double s = 0.0;
    for (std::size_t r = 0; r < V.rows(); ++r) {
      double p = 0.0;
      for (std::size_t j = 0; j < 96; ++j) p += V(r, j) * F(i, j);
      s += lambda[r] * p * p;
    }
    CHECK(dens[i] == doctest::Approx(s / 2.5).epsilon(1e-12));
  }
}

TEST_CASE("normalize_rows rejects zero rows") {
  Tensor F(Shape{3, 4}, 1.0);
  for (double& v : F.row(1)) v = 0.0;
  CHECK_THROWS_AS(k::serial::normalize_rows(F), InvalidArgument);
  CHECK_THROWS_AS(k::omp::normalize_rows(F), InvalidArgument);
}

TEST_CASE("pairwise_dot matches a plain sum") {
  std::mt19937_64 rng(4);
  for (std::size_t n : {0u, 1u, 31u, 32u, 33u, 1000u}) {
    const Tensor a = oracle::random_matrix(1, n == 0 ? 1 : n, rng);
    const Tensor b = oracle::random_matrix(1, n == 0 ? 1 : n, rng);
    const auto sa = a.row(0).first(n), sb = b.row(0).first(n);
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += sa[i] * sb[i];
    CHECK(k::pairwise_dot(sa, sb) == doctest::Approx(s).epsilon(1e-12));
  }
}
