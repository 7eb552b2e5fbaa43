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

#include "addm/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "addm/error.hpp"

namespace addm::ad {

std::string_view op_name(Op op) {
  switch (op) {
    case Op::Constant: return "constant";
    case Op::Variable: return "variable";
    case Op::MatMul: return "matmul";
    case Op::MatMulT: return "matmul_t";
    case Op::Add: return "add";
    case Op::Sub: return "sub";
    case Op::Mul: return "mul";
    case Op::DivRows: return "div_rows";
    case Op::Scale: return "scale";
    case Op::Cos: return "cos";
    case Op::Square: return "square";
    case Op::Relu: return "relu";
    case Op::Log: return "log";
    case Op::SquaredNorm: return "squared_norm";
    case Op::Sum: return "sum";
    case Op::Mean: return "mean";
    case Op::Softmax: return "softmax";
    case Op::Concat: return "concat";
    case Op::Dot: return "dot";
    case Op::L2Norm: return "l2_norm";
    case Op::CosineSimilarity: return "cosine_similarity";
    case Op::RowSum: return "row_sum";
    case Op::RowSquaredNorm: return "row_squared_norm";
    case Op::RowDot: return "row_dot";
    case Op::RowL2Norm: return "row_l2_norm";
    case Op::RowCosineSimilarity: return "row_cosine_similarity";
  }
  return "unknown";
}

const Tensor& Gradients::operator[](Var v) const {
  auto it = grads_.find(v.id);
  if (it == grads_.end())
    throw InvalidArgument("Gradients: node " + std::to_string(v.id) + " is not a trainable leaf");
  return it->second;
}

namespace {

[[noreturn]] void shape_error(Op op, const Shape& a, const Shape& b) {
  std::ostringstream msg;
  msg << op_name(op) << ": incompatible shapes " << to_string(a) << " and " << to_string(b);
  throw ShapeError(msg.str());
}

[[noreturn]] void shape_error(Op op, const Shape& a, std::string_view need) {
  std::ostringstream msg;
  msg << op_name(op) << ": shape " << to_string(a) << " (expected " << need << ")";
  throw ShapeError(msg.str());
}

// How operand b combines with operand a in the elementwise binary ops.
enum class Broadcast { Same, Row, Scalar };

Broadcast broadcast_kind(const Shape& a, const Shape& b) {
  if (a == b) return Broadcast::Same;
  if (b.empty()) return Broadcast::Scalar;
  if (a.size() == 2 && b.size() == 1 && a[1] == b[0]) return Broadcast::Row;
  return static_cast<Broadcast>(-1);
}

inline std::size_t bcast_index(Broadcast kind, std::size_t i, std::size_t cols) {
  switch (kind) {
    case Broadcast::Same: return i;
    case Broadcast::Row: return i % cols;
    case Broadcast::Scalar: return 0;
  }
  return i;
}

// C(m,n) += A(m,k) B(k,n)
void gemm_nn(const double* a, const double* b, double* c, std::size_t m, std::size_t k,
             std::size_t n) {
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = a[i * k + p];
      if (aip == 0.0) continue;
      const double* brow = b + p * n;
      double* crow = c + i * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += aip * brow[j];
    }
}

// C(m,n) += A(m,k) B(n,k)^T
void gemm_nt(const double* a, const double* b, double* c, std::size_t m, std::size_t k,
             std::size_t n) {
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t p = 0; p < k; ++p) s += a[i * k + p] * b[j * k + p];
      c[i * n + j] += s;
    }
}

// C(k,n) += A(m,k)^T B(m,n)
void gemm_tn(const double* a, const double* b, double* c, std::size_t m, std::size_t k,
             std::size_t n) {
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = a[i * k + p];
      if (aip == 0.0) continue;
      const double* brow = b + i * n;
      double* crow = c + p * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += aip * brow[j];
    }
}

// (rows, cols) view of an operand: vectors are a single row.
struct Dims {
  std::size_t rows, cols;
};
Dims dims(const Shape& s) {
  if (s.size() == 2) return {s[0], s[1]};
  if (s.size() == 1) return {1, s[0]};
  return {1, 1};
}

double safe_norm(std::span<const double> v) { return std::sqrt(addm::squared_norm(v)); }

}  // namespace

Var Graph::constant(Tensor value) {
  Node node{Op::Constant, {}, value.shape(), 0.0, std::move(value), {}};
  nodes_.push_back(std::move(node));
  evaluated_root_ = static_cast<std::size_t>(-1);
  return Var{this, nodes_.size() - 1};
}

Var Graph::variable(Tensor value) {
  Var v = constant(std::move(value));
  nodes_[v.id].op = Op::Variable;
  return v;
}

void Graph::assign(Var leaf, Tensor value) {
  Node& node = nodes_.at(leaf.id);
  if (node.op != Op::Constant && node.op != Op::Variable)
    throw InvalidArgument("assign: node " + std::to_string(leaf.id) + " is not a leaf");
  if (value.shape() != node.shape) shape_error(Op::Variable, node.shape, value.shape());
  node.value = std::move(value);
  evaluated_root_ = static_cast<std::size_t>(-1);
}

const Tensor& Graph::value(Var v) const { return nodes_.at(v.id).value; }

Shape Graph::infer_shape(Op op, const std::vector<std::size_t>& in) const {
  auto sh = [&](std::size_t k) -> const Shape& { return nodes_.at(in[k]).shape; };
  switch (op) {
    case Op::MatMul: {
      const Shape &a = sh(0), &b = sh(1);
      if (a.size() == 2 && b.size() == 2 && a[1] == b[0]) return {a[0], b[1]};
      if (a.size() == 2 && b.size() == 1 && a[1] == b[0]) return {a[0]};
      if (a.size() == 1 && b.size() == 2 && a[0] == b[0]) return {b[1]};
      shape_error(op, a, b);
    }
    case Op::MatMulT: {
      const Shape &a = sh(0), &b = sh(1);
      if (a.size() == 2 && b.size() == 2 && a[1] == b[1]) return {a[0], b[0]};
      if (a.size() == 1 && b.size() == 2 && a[0] == b[1]) return {b[0]};
      shape_error(op, a, b);
    }
    case Op::Add:
    case Op::Sub:
    case Op::Mul:
      if (static_cast<int>(broadcast_kind(sh(0), sh(1))) < 0) shape_error(op, sh(0), sh(1));
      return sh(0);
    case Op::DivRows:
      if (sh(0).size() != 2 || sh(1).size() != 1 || sh(0)[0] != sh(1)[0])
        shape_error(op, sh(0), sh(1));
      return sh(0);
    case Op::Scale:
    case Op::Cos:
    case Op::Square:
    case Op::Relu:
    case Op::Log:
      return sh(0);
    case Op::SquaredNorm:
    case Op::Sum:
    case Op::Mean:
    case Op::L2Norm:
      return {};
    case Op::Softmax:
      if (sh(0).size() != 1) shape_error(op, sh(0), "vector");
      return sh(0);
    case Op::Dot:
    case Op::CosineSimilarity:
      if (sh(0).size() != 1 || sh(0) != sh(1)) shape_error(op, sh(0), sh(1));
      return {};
    case Op::RowSum:
    case Op::RowSquaredNorm:
    case Op::RowL2Norm:
      if (sh(0).size() != 2) shape_error(op, sh(0), "matrix");
      return {sh(0)[0]};
    case Op::RowDot:
    case Op::RowCosineSimilarity:
      if (sh(0).size() != 2 || sh(0) != sh(1)) shape_error(op, sh(0), sh(1));
      return {sh(0)[0]};
    case Op::Concat: {
      if (in.empty()) throw ShapeError("concat: no operands");
      bool all_vectors = true;
      for (std::size_t k = 0; k < in.size(); ++k)
        if (sh(k).size() != 1) all_vectors = false;
      if (all_vectors) {
        std::size_t n = 0;
        for (std::size_t k = 0; k < in.size(); ++k) n += sh(k)[0];
        return {n};
      }
      std::size_t rows = 0, cols = 0;
      for (std::size_t k = 0; k < in.size(); ++k) {
        const Shape& s = sh(k);
        if (s.empty()) shape_error(op, s, "vector or matrix");
        const std::size_t r = s[0];
        if (k == 0) rows = r;
        if (r != rows) shape_error(op, sh(0), s);
        cols += s.size() == 2 ? s[1] : 1;
      }
      return {rows, cols};
    }
    case Op::Constant:
    case Op::Variable:
      break;
  }
  throw InvalidArgument("infer_shape: leaf op");
}

Var Graph::add_node(Op op, std::vector<std::size_t> inputs, double arg) {
  for (std::size_t id : inputs)
    if (id >= nodes_.size()) throw InvalidArgument("add_node: dangling input");
  Shape shape = infer_shape(op, inputs);
  nodes_.push_back(Node{op, std::move(inputs), std::move(shape), arg, {}, {}});
  return Var{this, nodes_.size() - 1};
}

std::vector<bool> Graph::ancestors(std::size_t root) const {
  std::vector<bool> mark(nodes_.size(), false);
  mark.at(root) = true;
  for (std::size_t i = root + 1; i-- > 0;) {
    if (!mark[i]) continue;
    for (std::size_t in : nodes_[i].inputs) mark[in] = true;
  }
  return mark;
}

void Graph::evaluate(Node& node) {
  auto in = [&](std::size_t k) -> const Tensor& { return nodes_[node.inputs[k]].value; };
  Tensor out(node.shape);
  auto o = out.data();
  switch (node.op) {
    case Op::Constant:
    case Op::Variable:
      return;
    case Op::MatMul: {
      const Dims a = dims(in(0).shape());
      const Dims b = in(1).rank() == 1 ? Dims{in(1).size(), 1} : dims(in(1).shape());
      gemm_nn(in(0).data().data(), in(1).data().data(), o.data(), a.rows, a.cols, b.cols);
      break;
    }
    case Op::MatMulT: {
      const Dims a = dims(in(0).shape()), b = dims(in(1).shape());
      gemm_nt(in(0).data().data(), in(1).data().data(), o.data(), a.rows, a.cols, b.rows);
      break;
    }
    case Op::Add:
    case Op::Sub:
    case Op::Mul: {
      const auto kind = broadcast_kind(in(0).shape(), in(1).shape());
      const auto a = in(0).data(), b = in(1).data();
      const std::size_t cols = in(0).cols();
      for (std::size_t i = 0; i < o.size(); ++i) {
        const double bv = b[bcast_index(kind, i, cols)];
        o[i] = node.op == Op::Add ? a[i] + bv : node.op == Op::Sub ? a[i] - bv : a[i] * bv;
      }
      break;
    }
    case Op::DivRows: {
      const Tensor& a = in(0);
      const auto v = in(1).data();
      for (std::size_t r = 0; r < a.rows(); ++r)
        for (std::size_t c = 0; c < a.cols(); ++c) out(r, c) = a(r, c) / v[r];
      break;
    }
    case Op::Scale:
      for (std::size_t i = 0; i < o.size(); ++i) o[i] = node.arg * in(0)[i];
      break;
    case Op::Cos:
      for (std::size_t i = 0; i < o.size(); ++i) o[i] = std::cos(in(0)[i]);
      break;
    case Op::Square:
      for (std::size_t i = 0; i < o.size(); ++i) o[i] = in(0)[i] * in(0)[i];
      break;
    case Op::Relu:
      for (std::size_t i = 0; i < o.size(); ++i) o[i] = std::max(in(0)[i], 0.0);
      break;
    case Op::Log:
      for (std::size_t i = 0; i < o.size(); ++i) o[i] = std::log(std::max(in(0)[i], kLogFloor));
      break;
    case Op::SquaredNorm:
      o[0] = addm::squared_norm(in(0).data());
      break;
    case Op::Sum:
    case Op::Mean: {
      double s = 0.0;
      for (double v : in(0).data()) s += v;
      o[0] = node.op == Op::Sum ? s : s / static_cast<double>(in(0).size());
      break;
    }
    case Op::Softmax: {
      const auto a = in(0).data();
      const double peak = *std::max_element(a.begin(), a.end());
      double z = 0.0;
      for (std::size_t i = 0; i < a.size(); ++i) z += (o[i] = std::exp(a[i] - peak));
      for (double& v : o) v /= z;
      break;
    }
    case Op::Concat: {
      if (out.rank() == 1) {
        std::size_t pos = 0;
        for (std::size_t k = 0; k < node.inputs.size(); ++k)
          for (double v : in(k).data()) o[pos++] = v;
      } else {
        std::size_t col0 = 0;
        for (std::size_t k = 0; k < node.inputs.size(); ++k) {
          const Tensor& part = in(k);
          const std::size_t w = part.rank() == 2 ? part.cols() : 1;
          for (std::size_t r = 0; r < out.rows(); ++r)
            for (std::size_t c = 0; c < w; ++c) out(r, col0 + c) = part[r * w + c];
          col0 += w;
        }
      }
      break;
    }
    case Op::Dot:
      o[0] = addm::dot(in(0).data(), in(1).data());
      break;
    case Op::L2Norm:
      o[0] = safe_norm(in(0).data());
      break;
    case Op::CosineSimilarity:
    case Op::RowCosineSimilarity: {
      const Tensor &a = in(0), &b = in(1);
      const std::size_t rows = node.op == Op::RowCosineSimilarity ? a.rows() : 1;
      const std::size_t n = a.size() / rows;
      for (std::size_t r = 0; r < rows; ++r) {
        const auto ar = a.data().subspan(r * n, n), br = b.data().subspan(r * n, n);
        const double na = safe_norm(ar), nb = safe_norm(br);
        o[r] = (na == 0.0 || nb == 0.0) ? 0.0 : std::clamp(addm::dot(ar, br) / (na * nb), -1.0, 1.0);
      }
      break;
    }
    case Op::RowSum:
      for (std::size_t r = 0; r < in(0).rows(); ++r) {
        double s = 0.0;
        for (double v : in(0).row(r)) s += v;
        o[r] = s;
      }
      break;
    case Op::RowSquaredNorm:
      for (std::size_t r = 0; r < in(0).rows(); ++r) o[r] = addm::squared_norm(in(0).row(r));
      break;
    case Op::RowL2Norm:
      for (std::size_t r = 0; r < in(0).rows(); ++r) o[r] = safe_norm(in(0).row(r));
      break;
    case Op::RowDot:
      for (std::size_t r = 0; r < in(0).rows(); ++r) o[r] = addm::dot(in(0).row(r), in(1).row(r));
      break;
  }
  node.value = std::move(out);
}

void Graph::propagate(const Node& node) {
  const Tensor& g = node.adjoint;
  const auto gd = g.data();
  auto in = [&](std::size_t k) -> const Tensor& { return nodes_[node.inputs[k]].value; };
  auto adj = [&](std::size_t k) -> Tensor& { return nodes_[node.inputs[k]].adjoint; };

  switch (node.op) {
    case Op::Constant:
    case Op::Variable:
      return;
    case Op::MatMul: {
      const Tensor &a = in(0), &b = in(1);
      const Dims ad = dims(a.shape());
      const Dims bd = b.rank() == 1 ? Dims{b.size(), 1} : dims(b.shape());
      // C(m,n) = A(m,k) B(k,n): dA = dC B^T, dB = A^T dC
      gemm_nt(gd.data(), b.data().data(), adj(0).data().data(), ad.rows, bd.cols, bd.rows);
      gemm_tn(a.data().data(), gd.data(), adj(1).data().data(), ad.rows, ad.cols, bd.cols);
      break;
    }
    case Op::MatMulT: {
      const Tensor &a = in(0), &b = in(1);
      const Dims ad = dims(a.shape()), bd = dims(b.shape());
      // C(m,n) = A(m,k) B(n,k)^T: dA = dC B, dB = dC^T A
      gemm_nn(gd.data(), b.data().data(), adj(0).data().data(), ad.rows, bd.rows, ad.cols);
      gemm_tn(gd.data(), a.data().data(), adj(1).data().data(), ad.rows, bd.rows, ad.cols);
      break;
    }
    case Op::Add:
    case Op::Sub:
    case Op::Mul: {
      const auto kind = broadcast_kind(in(0).shape(), in(1).shape());
      const auto a = in(0).data(), b = in(1).data();
      auto da = adj(0).data(), db = adj(1).data();
      const std::size_t cols = in(0).cols();
      for (std::size_t i = 0; i < gd.size(); ++i) {
        const std::size_t j = bcast_index(kind, i, cols);
        if (node.op == Op::Mul) {
          da[i] += gd[i] * b[j];
          db[j] += gd[i] * a[i];
        } else {
          da[i] += gd[i];
          db[j] += node.op == Op::Add ? gd[i] : -gd[i];
        }
      }
      break;
    }
    case Op::DivRows: {
      const Tensor& a = in(0);
      const auto v = in(1).data();
      Tensor &da = adj(0), &dv = adj(1);
      for (std::size_t r = 0; r < a.rows(); ++r)
        for (std::size_t c = 0; c < a.cols(); ++c) {
          const double gi = g(r, c);
          da(r, c) += gi / v[r];
          dv[r] -= gi * a(r, c) / (v[r] * v[r]);
        }
      break;
    }
    case Op::Scale:
      for (std::size_t i = 0; i < gd.size(); ++i) adj(0)[i] += node.arg * gd[i];
      break;
    case Op::Cos:
      for (std::size_t i = 0; i < gd.size(); ++i) adj(0)[i] -= gd[i] * std::sin(in(0)[i]);
      break;
    case Op::Square:
      for (std::size_t i = 0; i < gd.size(); ++i) adj(0)[i] += 2.0 * in(0)[i] * gd[i];
      break;
    case Op::Relu:
      for (std::size_t i = 0; i < gd.size(); ++i)
        if (in(0)[i] > 0.0) adj(0)[i] += gd[i];
      break;
    case Op::Log:
      for (std::size_t i = 0; i < gd.size(); ++i)
        if (in(0)[i] > kLogFloor) adj(0)[i] += gd[i] / in(0)[i];
      break;
    case Op::SquaredNorm:
      for (std::size_t i = 0; i < in(0).size(); ++i) adj(0)[i] += 2.0 * in(0)[i] * gd[0];
      break;
    case Op::Sum:
    case Op::Mean: {
      const double s = node.op == Op::Sum ? gd[0] : gd[0] / static_cast<double>(in(0).size());
      for (double& v : adj(0).data()) v += s;
      break;
    }
    case Op::Softmax: {
      const auto s = node.value.data();
      const double gs = addm::dot(gd, s);
      for (std::size_t i = 0; i < s.size(); ++i) adj(0)[i] += s[i] * (gd[i] - gs);
      break;
    }
    case Op::Concat: {
      if (node.value.rank() == 1) {
        std::size_t pos = 0;
        for (std::size_t k = 0; k < node.inputs.size(); ++k)
          for (double& v : adj(k).data()) v += gd[pos++];
      } else {
        std::size_t col0 = 0;
        for (std::size_t k = 0; k < node.inputs.size(); ++k) {
          Tensor& part = adj(k);
          const std::size_t w = part.rank() == 2 ? part.cols() : 1;
          for (std::size_t r = 0; r < g.rows(); ++r)
            for (std::size_t c = 0; c < w; ++c) part[r * w + c] += g(r, col0 + c);
          col0 += w;
        }
      }
      break;
    }
    case Op::Dot:
      for (std::size_t i = 0; i < in(0).size(); ++i) {
        adj(0)[i] += gd[0] * in(1)[i];
        adj(1)[i] += gd[0] * in(0)[i];
      }
      break;
    case Op::L2Norm: {
      const double n = node.value[0];
      if (n == 0.0) break;
      for (std::size_t i = 0; i < in(0).size(); ++i) adj(0)[i] += gd[0] * in(0)[i] / n;
      break;
    }
    case Op::RowL2Norm:
      for (std::size_t r = 0; r < in(0).rows(); ++r) {
        const double n = node.value[r];
        if (n == 0.0) continue;
        auto a = in(0).row(r);
        auto da = adj(0).row(r);
        for (std::size_t c = 0; c < a.size(); ++c) da[c] += gd[r] * a[c] / n;
      }
      break;
    case Op::CosineSimilarity:
    case Op::RowCosineSimilarity: {
      const Tensor &a = in(0), &b = in(1);
      const std::size_t rows = node.op == Op::RowCosineSimilarity ? a.rows() : 1;
      const std::size_t n = a.size() / rows;
      for (std::size_t r = 0; r < rows; ++r) {
        const auto ar = a.data().subspan(r * n, n), br = b.data().subspan(r * n, n);
        const double na = safe_norm(ar), nb = safe_norm(br);
        if (na == 0.0 || nb == 0.0) continue;
        const double c = addm::dot(ar, br) / (na * nb);
        auto da = adj(0).data().subspan(r * n, n), db = adj(1).data().subspan(r * n, n);
        for (std::size_t i = 0; i < n; ++i) {
          da[i] += gd[r] * (br[i] / (na * nb) - c * ar[i] / (na * na));
          db[i] += gd[r] * (ar[i] / (na * nb) - c * br[i] / (nb * nb));
        }
      }
      break;
    }
    case Op::RowSum:
      for (std::size_t r = 0; r < in(0).rows(); ++r)
        for (double& v : adj(0).row(r)) v += gd[r];
      break;
    case Op::RowSquaredNorm:
      for (std::size_t r = 0; r < in(0).rows(); ++r) {
        auto a = in(0).row(r);
        auto da = adj(0).row(r);
        for (std::size_t c = 0; c < a.size(); ++c) da[c] += 2.0 * gd[r] * a[c];
      }
      break;
    case Op::RowDot:
      for (std::size_t r = 0; r < in(0).rows(); ++r) {
        auto a = in(0).row(r), b = in(1).row(r);
        auto da = adj(0).row(r), db = adj(1).row(r);
        for (std::size_t c = 0; c < a.size(); ++c) {
          da[c] += gd[r] * b[c];
          db[c] += gd[r] * a[c];
        }
      }
      break;
  }
}

const Tensor& Graph::forward(Var root) {
  if (root.graph != this) throw InvalidArgument("forward: root belongs to another graph");
  const auto mark = ancestors(root.id);
  for (std::size_t i = 0; i <= root.id; ++i) {
    if (!mark[i]) continue;
    Node& node = nodes_[i];
    evaluate(node);
    if (!node.value.all_finite()) {
      std::ostringstream msg;
      msg << "non-finite value at node " << i << " (" << op_name(node.op) << ")";
      throw NonFiniteError(msg.str(), i);
    }
  }
  evaluated_root_ = root.id;
  return nodes_[root.id].value;
}

Gradients Graph::backward(Var root) {
  if (root.graph != this) throw InvalidArgument("backward: root belongs to another graph");
  if (evaluated_root_ != root.id) throw InvalidArgument("backward: call forward(root) first");
  if (nodes_[root.id].value.size() != 1 || !nodes_[root.id].shape.empty())
    throw ShapeError("backward: root must be a scalar, got shape " +
                     to_string(nodes_[root.id].shape));
  const auto mark = ancestors(root.id);
  for (std::size_t i = 0; i <= root.id; ++i)
    if (mark[i]) nodes_[i].adjoint = Tensor(nodes_[i].shape);
  nodes_[root.id].adjoint[0] = 1.0;
  for (std::size_t i = root.id + 1; i-- > 0;)
    if (mark[i]) propagate(nodes_[i]);

  Gradients out;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].op != Op::Variable) continue;
    out.grads_.emplace(i, (i <= root.id && mark[i]) ? nodes_[i].adjoint : Tensor(nodes_[i].shape));
  }
  return out;
}

namespace {
Var unary(Op op, Var a, double arg = 0.0) { return a.graph->add_node(op, {a.id}, arg); }
Var binary(Op op, Var a, Var b) {
  if (a.graph != b.graph) throw InvalidArgument(std::string(op_name(op)) + ": mixed graphs");
  return a.graph->add_node(op, {a.id, b.id});
}
}  // namespace

Var matmul(Var a, Var b) { return binary(Op::MatMul, a, b); }
Var matmul_t(Var a, Var b) { return binary(Op::MatMulT, a, b); }
Var add(Var a, Var b) { return binary(Op::Add, a, b); }
Var sub(Var a, Var b) { return binary(Op::Sub, a, b); }
Var mul(Var a, Var b) { return binary(Op::Mul, a, b); }
Var div_rows(Var a, Var v) { return binary(Op::DivRows, a, v); }
Var scale(Var a, double factor) { return unary(Op::Scale, a, factor); }
Var cos(Var a) { return unary(Op::Cos, a); }
Var square(Var a) { return unary(Op::Square, a); }
Var relu(Var a) { return unary(Op::Relu, a); }
Var log(Var a) { return unary(Op::Log, a); }
Var squared_norm(Var a) { return unary(Op::SquaredNorm, a); }
Var sum(Var a) { return unary(Op::Sum, a); }
Var mean(Var a) { return unary(Op::Mean, a); }
Var softmax(Var a) { return unary(Op::Softmax, a); }
Var dot(Var a, Var b) { return binary(Op::Dot, a, b); }
Var l2_norm(Var a) { return unary(Op::L2Norm, a); }
Var cosine_similarity(Var a, Var b) { return binary(Op::CosineSimilarity, a, b); }
Var row_sum(Var a) { return unary(Op::RowSum, a); }
Var row_squared_norm(Var a) { return unary(Op::RowSquaredNorm, a); }
Var row_dot(Var a, Var b) { return binary(Op::RowDot, a, b); }
Var row_l2_norm(Var a) { return unary(Op::RowL2Norm, a); }
Var row_cosine_similarity(Var a, Var b) { return binary(Op::RowCosineSimilarity, a, b); }

Var concat(const std::vector<Var>& parts) {
  if (parts.empty()) throw ShapeError("concat: no operands");
  std::vector<std::size_t> ids;
  for (const Var& p : parts) {
    if (p.graph != parts.front().graph) throw InvalidArgument("concat: mixed graphs");
    ids.push_back(p.id);
  }
  return parts.front().graph->add_node(Op::Concat, std::move(ids));
}

double gradient_check(Graph& graph, Var root, Var leaf, double step) {
  if (!(step > 0.0)) throw InvalidArgument("gradient_check: step must be > 0");
  if (!graph.trainable(leaf)) throw InvalidArgument("gradient_check: leaf is not trainable");
  graph.forward(root);
  const Tensor analytic = graph.backward(root)[leaf];
  const Tensor base = graph.value(leaf);

  double worst = 0.0;
  for (std::size_t i = 0; i < base.size(); ++i) {
    Tensor probe = base;
    probe[i] = base[i] + step;
    graph.assign(leaf, probe);
    const double up = graph.forward(root).item();
    probe[i] = base[i] - step;
    graph.assign(leaf, probe);
    const double down = graph.forward(root).item();
    if (!std::isfinite(up) || !std::isfinite(down))
      throw NonFiniteError("gradient_check: non-finite perturbed loss", root.id);
    const double numeric = (up - down) / (2.0 * step);
    worst = std::max(worst, std::abs(analytic[i] - numeric) / std::max(1.0, std::abs(analytic[i])));
  }
  graph.assign(leaf, base);
  graph.forward(root);
  return worst;
}

}  // namespace addm::ad
