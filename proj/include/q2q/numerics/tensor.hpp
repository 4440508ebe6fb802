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

#ifndef Q2Q_NUMERICS_TENSOR_HPP_
#define Q2Q_NUMERICS_TENSOR_HPP_

#include <Eigen/Dense>

#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "q2q/errors.hpp"

namespace q2q {

using Index = Eigen::Index;
using Shape = std::vector<Index>;

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using RowMatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline std::string shape_string(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) os << (i ? "x" : "") << shape[i];
  os << ']';
  return os.str();
}

inline Index shape_size(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), Index{1}, std::multiplies<Index>());
}

/// Dense row-major tensor of arbitrary rank. Storage is a flat Eigen
/// vector so whole-tensor arithmetic stays in Eigen expressions; rank-2
/// tensors expose a row-major matrix map.
template <typename Scalar = double>
class Tensor {
 public:
  using Vector = VectorX<Scalar>;
  using MatrixMap = Eigen::Map<RowMatrixX<Scalar>>;
  using ConstMatrixMap = Eigen::Map<const RowMatrixX<Scalar>>;

  Tensor() = default;

  explicit Tensor(Shape shape) : shape_(std::move(shape)) {
    check_shape();
    data_ = Vector::Zero(shape_size(shape_));
  }

  Tensor(Shape shape, Vector data) : shape_(std::move(shape)), data_(std::move(data)) {
    check_shape();
    if (shape_size(shape_) != data_.size()) {
      throw DimensionError("tensor shape " + shape_string(shape_) + " does not hold " +
                           std::to_string(data_.size()) + " values");
    }
  }

  Tensor(Shape shape, std::initializer_list<Scalar> values)
      : Tensor(std::move(shape), Eigen::Map<const Vector>(values.begin(), static_cast<Index>(values.size()))) {}

  template <typename Derived>
  static Tensor from_matrix(const Eigen::MatrixBase<Derived>& m) {
    RowMatrixX<Scalar> rm = m;
    return Tensor({rm.rows(), rm.cols()}, Eigen::Map<const Vector>(rm.data(), rm.size()));
  }

  template <typename Derived>
  static Tensor from_vector(const Eigen::MatrixBase<Derived>& v) {
    Vector flat = v;
    Index n = flat.size();
    return Tensor({n}, std::move(flat));
  }

  const Shape& shape() const { return shape_; }
  Index rank() const { return static_cast<Index>(shape_.size()); }
  Index dim(Index axis) const { return shape_.at(static_cast<std::size_t>(axis)); }
  Index size() const { return data_.size(); }
  bool empty() const { return data_.size() == 0; }

  Vector& data() { return data_; }
  const Vector& data() const { return data_; }

  Scalar& operator[](Index i) { return data_[i]; }
  Scalar operator[](Index i) const { return data_[i]; }

  template <typename... I>
  Scalar& operator()(I... idx) { return data_[offset({static_cast<Index>(idx)...})]; }
  template <typename... I>
  Scalar operator()(I... idx) const { return data_[offset({static_cast<Index>(idx)...})]; }

  /// Rank-2 view. Higher ranks may be viewed as rows x cols when the
  /// product matches, e.g. C x (H*W).
  MatrixMap matrix() {
    require_rank(2);
    return MatrixMap(data_.data(), shape_[0], shape_[1]);
  }
  ConstMatrixMap matrix() const {
    require_rank(2);
    return ConstMatrixMap(data_.data(), shape_[0], shape_[1]);
  }
  MatrixMap matrix(Index rows, Index cols) {
    require_size(rows * cols);
    return MatrixMap(data_.data(), rows, cols);
  }
  ConstMatrixMap matrix(Index rows, Index cols) const {
    require_size(rows * cols);
    return ConstMatrixMap(data_.data(), rows, cols);
  }

  void set_zero() { data_.setZero(); }
  bool all_finite() const { return data_.allFinite(); }

  friend bool operator==(const Tensor& a, const Tensor& b) {
    return a.shape_ == b.shape_ && a.data_ == b.data_;
  }

 private:
  void check_shape() const {
    for (Index d : shape_) {
      if (d <= 0) throw DimensionError("tensor shape " + shape_string(shape_) + " has a non-positive dimension");
    }
  }
  void require_rank(Index r) const {
    if (rank() != r) throw DimensionError("expected rank " + std::to_string(r) + ", got " + shape_string(shape_));
  }
  void require_size(Index n) const {
    if (size() != n) throw DimensionError("cannot view " + shape_string(shape_) + " with " + std::to_string(n) + " values");
  }
  Index offset(std::initializer_list<Index> idx) const {
    Index off = 0;
    std::size_t axis = 0;
    for (Index i : idx) off = off * shape_[axis++] + i;
    return off;
  }

  Shape shape_;
  Vector data_;
};

template <typename Scalar>
void require_same_shape(const Tensor<Scalar>& a, const Tensor<Scalar>& b, const char* what) {
  if (a.shape() != b.shape()) {
    throw DimensionError(std::string(what) + ": shapes " + shape_string(a.shape()) + " and " +
                         shape_string(b.shape()) + " differ");
  }
}

}  // namespace q2q

#endif  // Q2Q_NUMERICS_TENSOR_HPP_
