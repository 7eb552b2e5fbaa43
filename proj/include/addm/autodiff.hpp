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

// Define-by-run reverse-mode differentiation over small dense tensors.
//
// A Graph owns its nodes; Var is a cheap handle (graph pointer + node index).
// Nodes are appended in creation order, which is always a topological order,
// so forward() and backward() are single sweeps over the ancestor set of the
// root. Leaf values may be reassigned and the graph re-evaluated; this is how
// gradient_check() perturbs a leaf.

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "addm/tensor.hpp"

namespace addm::ad {

/// Floor applied inside log(): log(max(x, kLogFloor)).
inline constexpr double kLogFloor = 1e-30;

enum class Op : std::uint8_t {
  Constant,
  Variable,
  MatMul,
  MatMulT,
  Add,
  Sub,
  Mul,
  DivRows,
  Scale,
  Cos,
  Square,
  Relu,
  Log,
  SquaredNorm,
  Sum,
  Mean,
  Softmax,
  Concat,
  Dot,
  L2Norm,
  CosineSimilarity,
  RowSum,
  RowSquaredNorm,
  RowDot,
  RowL2Norm,
  RowCosineSimilarity,
};

std::string_view op_name(Op op);

class Graph;

struct Var {
  Graph* graph = nullptr;
  std::size_t id = 0;
};

/// d(root)/d(leaf) for every trainable leaf of a graph.
class Gradients {
 public:
  bool contains(Var v) const { return grads_.count(v.id) != 0; }
  const Tensor& operator[](Var v) const;
  std::size_t size() const noexcept { return grads_.size(); }

 private:
  friend class Graph;
  std::unordered_map<std::size_t, Tensor> grads_;
};

class Graph {
 public:
  Graph() = default;
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  Var constant(Tensor value);
  Var variable(Tensor value);

  /// Replace a leaf's value. The shape must not change.
  void assign(Var leaf, Tensor value);

  /// Evaluate every ancestor of root exactly once and return root's value.
  const Tensor& forward(Var root);

  /// Reverse sweep from a scalar root. Requires forward(root) first.
  Gradients backward(Var root);

  const Tensor& value(Var v) const;
  const Shape& shape(Var v) const { return nodes_.at(v.id).shape; }
  bool trainable(Var v) const { return nodes_.at(v.id).op == Op::Variable; }
  std::size_t size() const noexcept { return nodes_.size(); }

  /// Used by the op builders below; validates shapes eagerly.
  Var add_node(Op op, std::vector<std::size_t> inputs, double arg = 0.0);

 private:
  struct Node {
    Op op;
    std::vector<std::size_t> inputs;
    Shape shape;
    double arg = 0.0;
    Tensor value;
    Tensor adjoint;
  };

  std::vector<bool> ancestors(std::size_t root) const;
  void evaluate(Node& node);
  void propagate(const Node& node);
  Shape infer_shape(Op op, const std::vector<std::size_t>& inputs) const;

  std::vector<Node> nodes_;
  std::size_t evaluated_root_ = static_cast<std::size_t>(-1);
};

// Linear algebra. Matrices are (rows, cols); vectors broadcast as noted.
Var matmul(Var a, Var b);    // (m,k)(k,n) -> (m,n); (m,k)(k) -> (m); (k)(k,n) -> (n)
Var matmul_t(Var a, Var b);  // a * b^T: (m,k)(n,k) -> (m,n); (k)(n,k) -> (n)
Var add(Var a, Var b);       // same shape, or matrix + row vector, or + scalar
Var sub(Var a, Var b);
Var mul(Var a, Var b);       // elementwise, same broadcasting as add
Var div_rows(Var a, Var v);  // (m,n) / (m): row i divided by v[i]
Var scale(Var a, double factor);

Var cos(Var a);
Var square(Var a);
Var relu(Var a);
Var log(Var a);  // guarded, see kLogFloor

Var squared_norm(Var a);  // -> scalar
Var sum(Var a);           // -> scalar
Var mean(Var a);          // -> scalar
Var softmax(Var a);       // vector -> vector
Var concat(const std::vector<Var>& parts);
Var dot(Var a, Var b);                // vectors -> scalar
Var l2_norm(Var a);                   // -> scalar
Var cosine_similarity(Var a, Var b);  // vectors -> scalar in [-1, 1]

Var row_sum(Var a);                       // (m,n) -> (m)
Var row_squared_norm(Var a);              // (m,n) -> (m)
Var row_dot(Var a, Var b);                // (m,n),(m,n) -> (m)
Var row_l2_norm(Var a);                   // (m,n) -> (m)
Var row_cosine_similarity(Var a, Var b);  // (m,n),(m,n) -> (m)

inline Var operator+(Var a, Var b) { return add(a, b); }
inline Var operator-(Var a, Var b) { return sub(a, b); }
inline Var operator*(Var a, Var b) { return mul(a, b); }
inline Var operator*(double s, Var a) { return scale(a, s); }

/// Max over leaf entries of |analytic - central difference| / max(1, |analytic|).
/// The leaf must be trainable and root scalar; the leaf value is restored.
double gradient_check(Graph& graph, Var root, Var leaf, double step);

}  // namespace addm::ad
