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

#ifndef Q2Q_NUMERICS_GRADCHECK_HPP_
#define Q2Q_NUMERICS_GRADCHECK_HPP_

#include <algorithm>
#include <functional>

#include "q2q/numerics/tensor.hpp"

namespace q2q {

/// Central-difference gradient of a scalar function, one coordinate at a time.
template <typename Scalar, typename F>
Tensor<Scalar> finite_diff_grad(F&& f, const Tensor<Scalar>& x, Scalar h = Scalar(1e-5)) {
  Tensor<Scalar> probe = x;
  Tensor<Scalar> grad(x.shape());
  for (Index i = 0; i < x.size(); ++i) {
    Scalar orig = probe[i];
    probe[i] = orig + h;
    Scalar up = f(static_cast<const Tensor<Scalar>&>(probe));
    probe[i] = orig - h;
    Scalar down = f(static_cast<const Tensor<Scalar>&>(probe));
    probe[i] = orig;
    grad[i] = (up - down) / (Scalar(2) * h);
  }
  return grad;
}

/// ||a - b|| / max(||a|| + ||b||, floor). Zero when both are zero.
template <typename Scalar>
Scalar relative_error(const Tensor<Scalar>& a, const Tensor<Scalar>& b, Scalar floor = Scalar(1e-12)) {
  require_same_shape(a, b, "relative_error");
  Scalar diff = (a.data() - b.data()).norm();
  Scalar scale = a.data().norm() + b.data().norm();
  if (scale < floor) return diff;
  return diff / scale;
}

}  // namespace q2q

#endif  // Q2Q_NUMERICS_GRADCHECK_HPP_
