// Copyright 2026 The Q2Q Authors.
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

#ifndef Q2Q_NUMERICS_OPS_HPP_
#define Q2Q_NUMERICS_OPS_HPP_

#include <cmath>
#include <span>
#include <utility>
#include <vector>

#include "q2q/numerics/tensor.hpp"

namespace q2q {

// Activations as Eigen array expressions, usable on any dense block.

template <typename Derived>
auto sigmoid(const Eigen::ArrayBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  return Scalar(1) / (Scalar(1) + (-x).exp());
}

template <typename Derived>
auto relu(const Eigen::ArrayBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  return x.max(Scalar(0));
}

/// Gradient through y = sigmoid(x), expressed in terms of the output.
template <typename DerivedY, typename DerivedG>
auto sigmoid_grad(const Eigen::ArrayBase<DerivedY>& y, const Eigen::ArrayBase<DerivedG>& dy) {
  using Scalar = typename DerivedY::Scalar;
  return dy * y * (Scalar(1) - y);
}

template <typename DerivedY, typename DerivedG>
auto tanh_grad(const Eigen::ArrayBase<DerivedY>& y, const Eigen::ArrayBase<DerivedG>& dy) {
  using Scalar = typename DerivedY::Scalar;
  return dy * (Scalar(1) - y.square());
}

template <typename DerivedX, typename DerivedG>
auto relu_grad(const Eigen::ArrayBase<DerivedX>& x, const Eigen::ArrayBase<DerivedG>& dy) {
  using Scalar = typename DerivedX::Scalar;
  return (x > Scalar(0)).select(dy, Scalar(0));
}

/// Numerically stable log(sigmoid(z)).
template <typename Scalar>
Scalar log_sigmoid(Scalar z) {
  return z >= 0 ? -std::log1p(std::exp(-z)) : z - std::log1p(std::exp(z));
}

// Tensor-level operations.

template <typename Scalar>
Tensor<Scalar> matmul(const Tensor<Scalar>& a, const Tensor<Scalar>& b) {
  if (a.rank() != 2 || b.rank() != 2 || a.dim(1) != b.dim(0)) {
    throw DimensionError("matmul: cannot multiply " + shape_string(a.shape()) + " by " + shape_string(b.shape()));
  }
  return Tensor<Scalar>::from_matrix(a.matrix() * b.matrix());
}

/// Returns (dA, dB) for C = A * B.
template <typename Scalar>
std::pair<Tensor<Scalar>, Tensor<Scalar>> matmul_backward(const Tensor<Scalar>& a, const Tensor<Scalar>& b,
                                                          const Tensor<Scalar>& dc) {
  return {Tensor<Scalar>::from_matrix(dc.matrix() * b.matrix().transpose()),
          Tensor<Scalar>::from_matrix(a.matrix().transpose() * dc.matrix())};
}

template <typename Scalar>
Tensor<Scalar> add(const Tensor<Scalar>& a, const Tensor<Scalar>& b) {
  require_same_shape(a, b, "add");
  return Tensor<Scalar>(a.shape(), a.data() + b.data());
}

template <typename Scalar>
Tensor<Scalar> sub(const Tensor<Scalar>& a, const Tensor<Scalar>& b) {
  require_same_shape(a, b, "sub");
  return Tensor<Scalar>(a.shape(), a.data() - b.data());
}

template <typename Scalar>
Tensor<Scalar> mul(const Tensor<Scalar>& a, const Tensor<Scalar>& b) {
  require_same_shape(a, b, "mul");
  return Tensor<Scalar>(a.shape(), a.data().cwiseProduct(b.data()));
}

template <typename Scalar>
std::pair<Tensor<Scalar>, Tensor<Scalar>> add_backward(const Tensor<Scalar>& dout) {
  return {dout, dout};
}

template <typename Scalar>
std::pair<Tensor<Scalar>, Tensor<Scalar>> sub_backward(const Tensor<Scalar>& dout) {
  return {dout, Tensor<Scalar>(dout.shape(), -dout.data())};
}

template <typename Scalar>
std::pair<Tensor<Scalar>, Tensor<Scalar>> mul_backward(const Tensor<Scalar>& a, const Tensor<Scalar>& b,
                                                       const Tensor<Scalar>& dout) {
  return {Tensor<Scalar>(a.shape(), dout.data().cwiseProduct(b.data())),
          Tensor<Scalar>(b.shape(), dout.data().cwiseProduct(a.data()))};
}

template <typename Scalar>
Tensor<Scalar> abs(const Tensor<Scalar>& x) {
  return Tensor<Scalar>(x.shape(), x.data().cwiseAbs());
}

/// Subgradient 0 at x == 0.
template <typename Scalar>
Tensor<Scalar> abs_backward(const Tensor<Scalar>& x, const Tensor<Scalar>& dout) {
  return Tensor<Scalar>(x.shape(), (x.data().array().sign() * dout.data().array()).matrix());
}

template <typename Scalar>
Tensor<Scalar> sigmoid(const Tensor<Scalar>& x) {
  return Tensor<Scalar>(x.shape(), sigmoid(x.data().array()).matrix());
}

template <typename Scalar>
Tensor<Scalar> tanh(const Tensor<Scalar>& x) {
  return Tensor<Scalar>(x.shape(), x.data().array().tanh().matrix());
}

template <typename Scalar>
Tensor<Scalar> relu(const Tensor<Scalar>& x) {
  return Tensor<Scalar>(x.shape(), relu(x.data().array()).matrix());
}

template <typename Scalar>
Tensor<Scalar> sigmoid_backward(const Tensor<Scalar>& y, const Tensor<Scalar>& dout) {
  return Tensor<Scalar>(y.shape(), sigmoid_grad(y.data().array(), dout.data().array()).matrix());
}

template <typename Scalar>
Tensor<Scalar> tanh_backward(const Tensor<Scalar>& y, const Tensor<Scalar>& dout) {
  return Tensor<Scalar>(y.shape(), tanh_grad(y.data().array(), dout.data().array()).matrix());
}

template <typename Scalar>
Tensor<Scalar> relu_backward(const Tensor<Scalar>& x, const Tensor<Scalar>& dout) {
  return Tensor<Scalar>(x.shape(), relu_grad(x.data().array(), dout.data().array()).matrix());
}

namespace detail {

// Leading dims flattened into rows, last axis as columns.
template <typename Scalar>
auto last_axis_rows(const Tensor<Scalar>& x) {
  Index cols = x.dim(x.rank() - 1);
  return x.matrix(x.size() / cols, cols);
}

template <typename Scalar>
auto last_axis_rows(Tensor<Scalar>& x) {
  Index cols = x.dim(x.rank() - 1);
  return x.matrix(x.size() / cols, cols);
}

struct AxisSplit {
  Index outer;
  Index extent;
  Index inner;
};

inline AxisSplit split_axis(const Shape& shape, Index axis) {
  if (axis < 0 || axis >= static_cast<Index>(shape.size())) {
    throw DimensionError("axis " + std::to_string(axis) + " out of range for " + shape_string(shape));
  }
  AxisSplit s{1, shape[static_cast<std::size_t>(axis)], 1};
  for (Index i = 0; i < axis; ++i) s.outer *= shape[static_cast<std::size_t>(i)];
  for (Index i = axis + 1; i < static_cast<Index>(shape.size()); ++i) s.inner *= shape[static_cast<std::size_t>(i)];
  return s;
}

}  // namespace detail

/// Softmax over the last axis.
template <typename Scalar>
Tensor<Scalar> softmax(const Tensor<Scalar>& x) {
  Tensor<Scalar> y = x;
  auto rows = detail::last_axis_rows(y);
  for (Index r = 0; r < rows.rows(); ++r) {
    auto row = rows.row(r).array();
    row = (row - row.maxCoeff()).exp();
    row /= row.sum();
  }
  return y;
}

/// Log-softmax over the last axis.
template <typename Scalar>
Tensor<Scalar> log_softmax(const Tensor<Scalar>& x) {
  Tensor<Scalar> y = x;
  auto rows = detail::last_axis_rows(y);
  for (Index r = 0; r < rows.rows(); ++r) {
    auto row = rows.row(r).array();
    Scalar m = row.maxCoeff();
    Scalar lse = m + std::log((row - m).exp().sum());
    row -= lse;
  }
  return y;
}

template <typename Scalar>
Tensor<Scalar> softmax_backward(const Tensor<Scalar>& y, const Tensor<Scalar>& dout) {
  require_same_shape(y, dout, "softmax_backward");
  Tensor<Scalar> dx(y.shape());
  auto ys = detail::last_axis_rows(y);
  auto ds = detail::last_axis_rows(dout);
  auto dxs = detail::last_axis_rows(dx);
  for (Index r = 0; r < ys.rows(); ++r) {
    Scalar dot = ys.row(r).dot(ds.row(r));
    dxs.row(r) = ys.row(r).array() * (ds.row(r).array() - dot);
  }
  return dx;
}

/// Takes the log-softmax output.
template <typename Scalar>
Tensor<Scalar> log_softmax_backward(const Tensor<Scalar>& log_y, const Tensor<Scalar>& dout) {
  require_same_shape(log_y, dout, "log_softmax_backward");
  Tensor<Scalar> dx(log_y.shape());
  auto ls = detail::last_axis_rows(log_y);
  auto ds = detail::last_axis_rows(dout);
  auto dxs = detail::last_axis_rows(dx);
  for (Index r = 0; r < ls.rows(); ++r) {
    dxs.row(r) = ds.row(r).array() - ls.row(r).array().exp() * ds.row(r).sum();
  }
  return dx;
}

template <typename Scalar>
Tensor<Scalar> concat(std::span<const Tensor<Scalar>> parts, Index axis) {
  if (parts.empty()) throw DimensionError("concat: no inputs");
  Shape out_shape = parts.front().shape();
  Index total = 0;
  for (const auto& p : parts) {
    Shape a = p.shape();
    Shape b = out_shape;
    if (a.size() != b.size()) throw DimensionError("concat: rank mismatch " + shape_string(a) + " vs " + shape_string(b));
    auto s = detail::split_axis(a, axis);
    a[static_cast<std::size_t>(axis)] = b[static_cast<std::size_t>(axis)] = 0;
    if (a != b) throw DimensionError("concat: incompatible shapes " + shape_string(p.shape()) + " and " + shape_string(out_shape));
    total += s.extent;
  }
  out_shape[static_cast<std::size_t>(axis)] = total;
  Tensor<Scalar> out(out_shape);
  auto os = detail::split_axis(out_shape, axis);
  Index start = 0;
  for (const auto& p : parts) {
    auto s = detail::split_axis(p.shape(), axis);
    for (Index o = 0; o < s.outer; ++o) {
      out.data().segment((o * os.extent + start) * os.inner, s.extent * s.inner) =
          p.data().segment(o * s.extent * s.inner, s.extent * s.inner);
    }
    start += s.extent;
  }
  return out;
}

/// Inverse of concat: slices dout back into pieces of the given extents.
template <typename Scalar>
std::vector<Tensor<Scalar>> concat_backward(const Tensor<Scalar>& dout, std::span<const Index> extents, Index axis) {
  auto os = detail::split_axis(dout.shape(), axis);
  std::vector<Tensor<Scalar>> grads;
  Index start = 0;
  for (Index e : extents) {
    Shape shape = dout.shape();
    shape[static_cast<std::size_t>(axis)] = e;
    Tensor<Scalar> g(shape);
    for (Index o = 0; o < os.outer; ++o) {
      g.data().segment(o * e * os.inner, e * os.inner) =
          dout.data().segment((o * os.extent + start) * os.inner, e * os.inner);
    }
    grads.push_back(std::move(g));
    start += e;
  }
  if (start != os.extent) throw DimensionError("concat_backward: extents do not cover " + shape_string(dout.shape()));
  return grads;
}

template <typename Scalar>
struct MaxPoolResult {
  Tensor<Scalar> values;
  std::vector<Index> argmax;  // position along the pooled axis, one per output value
};

/// Maximum over one axis; ties resolve to the lowest index.
template <typename Scalar>
MaxPoolResult<Scalar> max_pool(const Tensor<Scalar>& x, Index axis) {
  auto s = detail::split_axis(x.shape(), axis);
  Shape out_shape = x.shape();
  out_shape.erase(out_shape.begin() + axis);
  if (out_shape.empty()) out_shape.push_back(1);
  MaxPoolResult<Scalar> r{Tensor<Scalar>(out_shape), std::vector<Index>(static_cast<std::size_t>(s.outer * s.inner))};
  for (Index o = 0; o < s.outer; ++o) {
    for (Index i = 0; i < s.inner; ++i) {
      Index best = 0;
      Scalar best_v = x[(o * s.extent) * s.inner + i];
      for (Index k = 1; k < s.extent; ++k) {
        Scalar v = x[(o * s.extent + k) * s.inner + i];
        if (v > best_v) {
          best_v = v;
          best = k;
        }
      }
      r.values[o * s.inner + i] = best_v;
      r.argmax[static_cast<std::size_t>(o * s.inner + i)] = best;
    }
  }
  return r;
}

template <typename Scalar>
Tensor<Scalar> max_pool_backward(const Shape& input_shape, Index axis, std::span<const Index> argmax,
                                 const Tensor<Scalar>& dout) {
  auto s = detail::split_axis(input_shape, axis);
  if (static_cast<Index>(argmax.size()) != s.outer * s.inner || dout.size() != s.outer * s.inner) {
    throw DimensionError("max_pool_backward: argmax/gradient size mismatch for " + shape_string(input_shape));
  }
  Tensor<Scalar> dx(input_shape);
  for (Index o = 0; o < s.outer; ++o) {
    for (Index i = 0; i < s.inner; ++i) {
      Index k = argmax[static_cast<std::size_t>(o * s.inner + i)];
      dx[(o * s.extent + k) * s.inner + i] += dout[o * s.inner + i];
    }
  }
  return dx;
}

}  // namespace q2q

#endif  // Q2Q_NUMERICS_OPS_HPP_
