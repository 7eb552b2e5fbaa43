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
#include <functional>
#include <random>
#include <string>

#include "addm/autodiff.hpp"
#include "addm/error.hpp"
#include "grad_ops.hpp"
#include "oracles.hpp"

using namespace addm;
namespace ad = addm::ad;
using gradops::uniform;
using gradops::worst_error;


TEST_CASE("forward evaluates small graphs") {
  ad::Graph g;
  auto x = g.variable(Tensor::scalar(3.0));
  CHECK(g.forward(x * x).item() == 9.0);

  auto zero = g.constant(Tensor::scalar(0.0));
  CHECK(g.forward(ad::cos(zero)).item() == 1.0);

  // |Lambda^(1/2) V phi|^2 with V = [u], Lambda = [1], phi = u.
  const double c = 1.0 / std::sqrt(3.0);
  auto V = g.constant(Tensor::matrix({{c, c, c}}));
  auto phi = g.constant(Tensor::vector({c, c, c}));
  auto lambda = g.constant(Tensor::vector({1.0}));
  auto proj = ad::matmul_t(phi, V);
  CHECK(g.forward(ad::sum(ad::mul(ad::square(proj), lambda))).item() ==
        doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("forward is bit-for-bit deterministic") {
  std::mt19937_64 rng(1);
  const Tensor A = uniform({6, 5}, rng), B = uniform({4, 5}, rng);
  auto run = [&] {
    ad::Graph g;
    auto a = g.variable(A);
    auto b = g.constant(B);
    return g.forward(ad::log(ad::row_squared_norm(ad::cos(ad::matmul_t(a, b))))).values();
  };
  CHECK(run() == run());
}

TEST_CASE("shape errors name the op and both shapes") {
  ad::Graph g;
  auto a = g.variable(Tensor(Shape{2, 3}));
  auto b = g.variable(Tensor(Shape{4, 5}));
  try {
    ad::matmul(a, b);
    FAIL("expected ShapeError");
  } catch (const ShapeError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("matmul") != std::string::npos);
    CHECK(msg.find("[2x3]") != std::string::npos);
    CHECK(msg.find("[4x5]") != std::string::npos);
  }
  CHECK_THROWS_AS(ad::add(a, b), ShapeError);
  CHECK_THROWS_AS(ad::row_dot(a, b), ShapeError);
  CHECK_THROWS_AS(ad::softmax(a), ShapeError);
}

TEST_CASE("non-finite intermediate reports the node id") {
  ad::Graph g;
  auto x = g.variable(Tensor::scalar(1e200));
  auto y = ad::square(x);
  try {
    g.forward(ad::scale(y, 2.0));
    FAIL("expected NonFiniteError");
  } catch (const NonFiniteError& e) {
    CHECK(e.node() == y.id);
    CHECK(std::string(e.what()).find(std::to_string(y.id)) != std::string::npos);
  }
}

TEST_CASE("backward analytic derivatives") {
  ad::Graph g;
  auto x = g.variable(Tensor::scalar(3.0));
  auto sq = x * x;
  g.forward(sq);
  CHECK(g.backward(sq)[x].item() == 6.0);

  auto z = g.variable(Tensor::scalar(0.0));
  auto c = ad::cos(z);
  g.forward(c);
  CHECK(g.backward(c)[z].item() == 0.0);
}

TEST_CASE("backward gives gradients to trainable leaves only") {
  ad::Graph g;
  auto w = g.variable(Tensor::vector({1.0, 2.0}));
  auto k = g.constant(Tensor::vector({3.0, 4.0}));
  auto unused = g.variable(Tensor::vector({5.0}));
  auto root = ad::dot(w, k);
  g.forward(root);
  const auto grads = g.backward(root);
  CHECK(grads.contains(w));
  CHECK_FALSE(grads.contains(k));
  CHECK(grads[w].values() == std::vector<double>{3.0, 4.0});
  CHECK(grads[unused].values() == std::vector<double>{0.0});
  CHECK_THROWS_AS(grads[k], InvalidArgument);
}

TEST_CASE("backward rejects non-scalar roots and missing forward") {
  ad::Graph g;
  auto v = g.variable(Tensor::vector({1.0, 2.0}));
  auto c = ad::cos(v);
  CHECK_THROWS_AS(g.backward(ad::sum(c)), Error);
  g.forward(c);
  CHECK_THROWS_AS(g.backward(c), ShapeError);
}

TEST_CASE("gradient of log |A v|^2 matches finite differences") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    ad::Graph g;
    auto A = g.variable(uniform({4, 4}, rng));
    auto v = g.constant(uniform({4}, rng));
    auto root = ad::log(ad::squared_norm(ad::matmul(A, v)));
    CHECK(ad::gradient_check(g, root, A, 1e-5) < 1e-4);
  }
}

TEST_CASE("gradient_check examples") {
  std::mt19937_64 rng(9);
  ad::Graph g;
  auto w = g.variable(uniform({5}, rng));
  auto x = g.constant(uniform({5}, rng));
  CHECK(ad::gradient_check(g, ad::dot(w, x), w, 1e-5) < 1e-8);

  auto y = g.variable(uniform({5}, rng));
  auto composite = ad::log(ad::sum(ad::square(ad::cos(y))));
  CHECK(ad::gradient_check(g, composite, y, 1e-5) < 1e-4);

  auto unused = g.variable(uniform({3}, rng));
  CHECK(ad::gradient_check(g, composite, unused, 1e-5) == 0.0);

  CHECK_THROWS_AS(ad::gradient_check(g, composite, y, 0.0), InvalidArgument);
  CHECK_THROWS_AS(ad::gradient_check(g, composite, x, 1e-5), InvalidArgument);
}

TEST_CASE("gradient_check fails on a non-finite perturbation") {
  ad::Graph g;
  auto x = g.variable(Tensor::vector({1.34e154}));
  auto root = ad::sum(ad::square(x));
  CHECK_THROWS_AS(ad::gradient_check(g, root, x, 1e152), NonFiniteError);
}

TEST_CASE("every op matches central differences on random inputs") {
  const auto ops = gradops::op_table();
  for (const auto& [name, build] : ops) {
    CAPTURE(name);
    CHECK(worst_error(build) < 1e-4);
  }
}

TEST_CASE("cosine similarity with a zero vector is zero and has zero gradient") {
  ad::Graph g;
  auto a = g.variable(Tensor::vector({0.0, 0.0}));
  auto b = g.variable(Tensor::vector({1.0, 2.0}));
  auto c = ad::cosine_similarity(a, b);
  CHECK(g.forward(c).item() == 0.0);
  const auto grads = g.backward(c);
  CHECK(grads[b].values() == std::vector<double>{0.0, 0.0});
}

TEST_CASE("log is floored") {
  ad::Graph g;
  auto x = g.variable(Tensor::vector({0.0}));
  auto root = ad::sum(ad::log(x));
  CHECK(g.forward(root).item() == doctest::Approx(std::log(ad::kLogFloor)));
}
