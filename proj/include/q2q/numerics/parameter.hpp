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

#ifndef Q2Q_NUMERICS_PARAMETER_HPP_
#define Q2Q_NUMERICS_PARAMETER_HPP_

#include <cmath>
#include <string>
#include <vector>

#include "q2q/numerics/random.hpp"
#include "q2q/numerics/tensor.hpp"

namespace q2q {

/// A named tensor with its gradient accumulator. `decay` marks tensors
/// that receive the L2 penalty (weights, not biases).
template <typename Scalar = double>
struct Parameter {
  std::string name;
  Tensor<Scalar> value;
  Tensor<Scalar> grad;
  bool trainable = true;
  bool decay = true;

  Parameter() = default;
  Parameter(std::string n, const Shape& shape, bool is_trainable, bool is_decayed)
      : name(std::move(n)), value(shape), grad(shape), trainable(is_trainable), decay(is_decayed) {}

  void zero_grad() { grad.set_zero(); }
};

template <typename Scalar>
using ParameterRefs = std::vector<Parameter<Scalar>*>;

/// Fills with i.i.d. draws from [-bound, +bound].
template <typename Scalar>
void fill_uniform(Parameter<Scalar>& p, Scalar bound, Rng& rng) {
  for (Index i = 0; i < p.value.size(); ++i) {
    p.value[i] = static_cast<Scalar>(rng.uniform(-static_cast<double>(bound), static_cast<double>(bound)));
  }
}

template <typename Scalar>
void fill_fan_in(Parameter<Scalar>& p, Index fan_in, Rng& rng) {
  fill_uniform(p, Scalar(1) / std::sqrt(static_cast<Scalar>(fan_in)), rng);
}

}  // namespace q2q

#endif  // Q2Q_NUMERICS_PARAMETER_HPP_
