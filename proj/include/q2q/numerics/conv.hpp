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

#ifndef Q2Q_NUMERICS_CONV_HPP_
#define Q2Q_NUMERICS_CONV_HPP_

#include "q2q/numerics/tensor.hpp"

namespace q2q {

struct ConvGeometry {
  Index channels, height, width;
  Index filters, kernel_h, kernel_w;
  Index stride, padding;
  Index out_h, out_w;
};

template <typename Scalar>
ConvGeometry conv_geometry(const Tensor<Scalar>& input, const Tensor<Scalar>& kernels, Index stride, Index padding) {
  if (input.rank() != 3 || kernels.rank() != 4 || kernels.dim(1) != input.dim(0)) {
    throw DimensionError("conv2d: input " + shape_string(input.shape()) + " incompatible with kernels " +
                         shape_string(kernels.shape()));
  }
  if (stride <= 0 || padding < 0) throw DimensionError("conv2d: stride must be positive and padding non-negative");
  ConvGeometry g{input.dim(0), input.dim(1), input.dim(2), kernels.dim(0), kernels.dim(2), kernels.dim(3),
                 stride, padding, 0, 0};
  if (g.kernel_h > g.height + 2 * padding || g.kernel_w > g.width + 2 * padding) {
    throw DimensionError("conv2d: kernel " + shape_string(kernels.shape()) + " larger than padded input " +
                         shape_string(input.shape()));
  }
  g.out_h = (g.height + 2 * padding - g.kernel_h) / stride + 1;
  g.out_w = (g.width + 2 * padding - g.kernel_w) / stride + 1;
  return g;
}

namespace detail {

// (C*kh*kw) x (out_h*out_w) patch matrix; out-of-bounds taps read zero.
template <typename Scalar>
MatrixX<Scalar> im2col(const Tensor<Scalar>& input, const ConvGeometry& g) {
  MatrixX<Scalar> cols = MatrixX<Scalar>::Zero(g.channels * g.kernel_h * g.kernel_w, g.out_h * g.out_w);
  for (Index c = 0; c < g.channels; ++c) {
    for (Index ki = 0; ki < g.kernel_h; ++ki) {
      for (Index kj = 0; kj < g.kernel_w; ++kj) {
        Index row = (c * g.kernel_h + ki) * g.kernel_w + kj;
        for (Index oi = 0; oi < g.out_h; ++oi) {
          Index y = oi * g.stride + ki - g.padding;
          if (y < 0 || y >= g.height) continue;
          for (Index oj = 0; oj < g.out_w; ++oj) {
            Index x = oj * g.stride + kj - g.padding;
            if (x < 0 || x >= g.width) continue;
            cols(row, oi * g.out_w + oj) = input(c, y, x);
          }
        }
      }
    }
  }
  return cols;
}

template <typename Scalar>
Tensor<Scalar> col2im(const MatrixX<Scalar>& cols, const ConvGeometry& g) {
  Tensor<Scalar> out({g.channels, g.height, g.width});
  for (Index c = 0; c < g.channels; ++c) {
    for (Index ki = 0; ki < g.kernel_h; ++ki) {
      for (Index kj = 0; kj < g.kernel_w; ++kj) {
        Index row = (c * g.kernel_h + ki) * g.kernel_w + kj;
        for (Index oi = 0; oi < g.out_h; ++oi) {
          Index y = oi * g.stride + ki - g.padding;
          if (y < 0 || y >= g.height) continue;
          for (Index oj = 0; oj < g.out_w; ++oj) {
            Index x = oj * g.stride + kj - g.padding;
            if (x < 0 || x >= g.width) continue;
            out(c, y, x) += cols(row, oi * g.out_w + oj);
          }
        }
      }
    }
  }
  return out;
}

}  // namespace detail

/// Cross-correlation of a C x H x W input with F x C x kh x kw kernels.
template <typename Scalar>
Tensor<Scalar> conv2d(const Tensor<Scalar>& input, const Tensor<Scalar>& kernels, Index stride = 1, Index padding = 0) {
  ConvGeometry g = conv_geometry(input, kernels, stride, padding);
  MatrixX<Scalar> cols = detail::im2col(input, g);
  Tensor<Scalar> out({g.filters, g.out_h, g.out_w});
  out.matrix(g.filters, g.out_h * g.out_w) = kernels.matrix(g.filters, cols.rows()) * cols;
  return out;
}

template <typename Scalar>
struct Conv2dGrads {
  Tensor<Scalar> input;
  Tensor<Scalar> kernels;
};

template <typename Scalar>
Conv2dGrads<Scalar> conv2d_backward(const Tensor<Scalar>& input, const Tensor<Scalar>& kernels,
                                    const Tensor<Scalar>& dout, Index stride = 1, Index padding = 0) {
  ConvGeometry g = conv_geometry(input, kernels, stride, padding);
  if (dout.shape() != Shape{g.filters, g.out_h, g.out_w}) {
    throw DimensionError("conv2d_backward: output gradient " + shape_string(dout.shape()) + " does not match geometry");
  }
  MatrixX<Scalar> cols = detail::im2col(input, g);
  auto dmat = dout.matrix(g.filters, g.out_h * g.out_w);
  auto kmat = kernels.matrix(g.filters, cols.rows());
  Conv2dGrads<Scalar> grads{Tensor<Scalar>(input.shape()), Tensor<Scalar>(kernels.shape())};
  grads.kernels.matrix(g.filters, cols.rows()) = dmat * cols.transpose();
  MatrixX<Scalar> dcols = kmat.transpose() * dmat;
  grads.input = detail::col2im(dcols, g);
  return grads;
}

}  // namespace q2q

#endif  // Q2Q_NUMERICS_CONV_HPP_
