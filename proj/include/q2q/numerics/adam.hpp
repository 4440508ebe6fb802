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

#ifndef Q2Q_NUMERICS_ADAM_HPP_
#define Q2Q_NUMERICS_ADAM_HPP_

#include <cmath>
#include <cstdint>

#include "q2q/numerics/tensor.hpp"

namespace q2q {

template <typename Scalar = double>
struct AdamState {
  Tensor<Scalar> first_moment;
  Tensor<Scalar> second_moment;
  std::int64_t step_count = 0;
  Scalar learning_rate = Scalar(5e-5);
  Scalar epsilon = Scalar(1e-8);
  Scalar l2_coefficient = Scalar(0);
  Scalar beta1 = Scalar(0.9);
  Scalar beta2 = Scalar(0.999);

  static AdamState for_shape(const Shape& shape, Scalar lr, Scalar eps, Scalar l2) {
    if (!(lr >= 0) || !(eps > 0) || !(l2 >= 0)) {
      throw ConfigError("adam: learning rate and l2 must be non-negative and epsilon positive");
    }
    return AdamState{Tensor<Scalar>(shape), Tensor<Scalar>(shape), 0, lr, eps, l2};
  }
};

/// One bias-corrected Adam update. The L2 term l2_coefficient * param is
/// folded into the gradient before the moment updates.
template <typename Scalar>
void adam_step(Tensor<Scalar>& param, const Tensor<Scalar>& grad, AdamState<Scalar>& state) {
  require_same_shape(param, grad, "adam_step");
  require_same_shape(param, state.first_moment, "adam_step");
  require_same_shape(param, state.second_moment, "adam_step");
  ++state.step_count;
  auto g = (grad.data() + state.l2_coefficient * param.data()).array().eval();
  auto m = state.first_moment.data().array();
  auto v = state.second_moment.data().array();
  m = state.beta1 * m + (Scalar(1) - state.beta1) * g;
  v = state.beta2 * v + (Scalar(1) - state.beta2) * g.square();
  Scalar t = static_cast<Scalar>(state.step_count);
  Scalar c1 = Scalar(1) - std::pow(state.beta1, t);
  Scalar c2 = Scalar(1) - std::pow(state.beta2, t);
  param.data().array() -= state.learning_rate * (m / c1) / ((v / c2).sqrt() + state.epsilon);
}

}  // namespace q2q

#endif  // Q2Q_NUMERICS_ADAM_HPP_
