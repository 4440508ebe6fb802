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

#ifndef Q2Q_ENCODERS_HPP_
#define Q2Q_ENCODERS_HPP_

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "q2q/errors.hpp"
#include "q2q/numerics.hpp"

namespace q2q {

enum class Gate : Index { input = 0, forget = 1, output = 2, candidate = 3 };

/// Single-layer LSTM. The four gate matrices are stacked row-wise in Gate
/// order: W is 4H x D, U is 4H x H, b is 4H.
template <typename Scalar = double>
struct LstmParams {
  Index input_dim = 0;
  Index hidden_dim = 0;
  bool trainable = true;
  Parameter<Scalar> W;
  Parameter<Scalar> U;
  Parameter<Scalar> b;

  static LstmParams zeros(Index input_dim, Index hidden_dim, const std::string& prefix, bool trainable) {
    if (input_dim <= 0 || hidden_dim <= 0) throw ConfigError("lstm: dimensions must be positive");
    LstmParams p;
    p.input_dim = input_dim;
    p.hidden_dim = hidden_dim;
    p.trainable = trainable;
    p.W = Parameter<Scalar>(prefix + ".W", {4 * hidden_dim, input_dim}, trainable, true);
    p.U = Parameter<Scalar>(prefix + ".U", {4 * hidden_dim, hidden_dim}, trainable, true);
    p.b = Parameter<Scalar>(prefix + ".b", {4 * hidden_dim}, trainable, false);
    return p;
  }

  auto gate_W(Gate g) const { return W.value.matrix().middleRows(static_cast<Index>(g) * hidden_dim, hidden_dim); }
  auto gate_U(Gate g) const { return U.value.matrix().middleRows(static_cast<Index>(g) * hidden_dim, hidden_dim); }
  auto gate_b(Gate g) const { return b.value.data().segment(static_cast<Index>(g) * hidden_dim, hidden_dim); }

  ParameterRefs<Scalar> parameters() { return {&W, &U, &b}; }
};

/// Trainable initialization: uniform +-1/sqrt(fan_in), zero bias except
/// the forget gate at +1.
template <typename Scalar>
void init_lstm_trainable(LstmParams<Scalar>& p, Rng& rng) {
  fill_fan_in(p.W, p.input_dim, rng);
  fill_fan_in(p.U, p.hidden_dim, rng);
  p.b.value.set_zero();
  p.b.value.data().segment(static_cast<Index>(Gate::forget) * p.hidden_dim, p.hidden_dim).setOnes();
}

/// Frozen random projection LSTM: every weight and bias i.i.d. uniform on
/// [-1/sqrt(d), +1/sqrt(d)] with d the hidden size.
template <typename Scalar = double>
LstmParams<Scalar> rand_lstm_init(Index hidden_dim, Index input_dim, std::uint64_t seed,
                                  const std::string& prefix = "rand_lstm") {
  LstmParams<Scalar> p = LstmParams<Scalar>::zeros(input_dim, hidden_dim, prefix, false);
  Rng rng(seed);
  Scalar bound = Scalar(1) / std::sqrt(static_cast<Scalar>(hidden_dim));
  fill_uniform(p.W, bound, rng);
  fill_uniform(p.U, bound, rng);
  fill_uniform(p.b, bound, rng);
  return p;
}

/// Per-step activations kept for backpropagation through time.
template <typename Scalar>
struct LstmTrace {
  MatrixX<Scalar> gates;      // T x 4H, post-activation, Gate order
  MatrixX<Scalar> cells;      // T x H
  MatrixX<Scalar> cell_tanh;  // T x H
  MatrixX<Scalar> hidden;     // T x H
};

template <typename Scalar, typename Derived>
LstmTrace<Scalar> lstm_trace(const Eigen::MatrixBase<Derived>& inputs, const LstmParams<Scalar>& p) {
  if (inputs.rows() > 0 && inputs.cols() != p.input_dim) {
    throw DimensionError("lstm: input dimension " + std::to_string(inputs.cols()) + " != " +
                         std::to_string(p.input_dim));
  }
  const Index T = inputs.rows();
  const Index H = p.hidden_dim;
  LstmTrace<Scalar> tr{MatrixX<Scalar>(T, 4 * H), MatrixX<Scalar>(T, H), MatrixX<Scalar>(T, H),
                       MatrixX<Scalar>(T, H)};
  if (T == 0) return tr;
  auto W = p.W.value.matrix();
  auto U = p.U.value.matrix();
  // Input projections for all steps at once; row t holds W x_t + b.
  MatrixX<Scalar> pre = (inputs * W.transpose()).rowwise() + p.b.value.data().transpose();
  VectorX<Scalar> h = VectorX<Scalar>::Zero(H);
  VectorX<Scalar> c = VectorX<Scalar>::Zero(H);
  for (Index t = 0; t < T; ++t) {
    VectorX<Scalar> z = pre.row(t).transpose() + U * h;
    z.head(3 * H) = sigmoid(z.head(3 * H).array()).matrix();
    z.tail(H) = z.tail(H).array().tanh().matrix();
    c = (z.segment(H, H).array() * c.array() + z.head(H).array() * z.tail(H).array()).matrix();
    auto ct = c.array().tanh().eval();
    h = (z.segment(2 * H, H).array() * ct).matrix();
    tr.gates.row(t) = z.transpose();
    tr.cells.row(t) = c.transpose();
    tr.cell_tanh.row(t) = ct.transpose().matrix();
    tr.hidden.row(t) = h.transpose();
  }
  return tr;
}

/// Hidden states, T x H, starting from zero h and c.
template <typename Scalar, typename Derived>
MatrixX<Scalar> lstm_forward(const Eigen::MatrixBase<Derived>& inputs, const LstmParams<Scalar>& p) {
  return lstm_trace(inputs, p).hidden;
}

/// Backpropagation through time. `d_hidden` is dLoss/dh_t for every step.
/// Parameter gradients accumulate into p when p is trainable; returns
/// dLoss/dinputs.
template <typename Scalar, typename DerivedX, typename DerivedG>
MatrixX<Scalar> lstm_backward(LstmParams<Scalar>& p, const Eigen::MatrixBase<DerivedX>& inputs,
                              const LstmTrace<Scalar>& tr, const Eigen::MatrixBase<DerivedG>& d_hidden) {
  const Index T = inputs.rows();
  const Index H = p.hidden_dim;
  if (d_hidden.rows() != T || d_hidden.cols() != H) throw DimensionError("lstm_backward: gradient shape mismatch");
  MatrixX<Scalar> dz(T, 4 * H);
  if (T == 0) return MatrixX<Scalar>(0, p.input_dim);
  auto U = p.U.value.matrix();
  VectorX<Scalar> dh_next = VectorX<Scalar>::Zero(H);
  VectorX<Scalar> dc_next = VectorX<Scalar>::Zero(H);
  for (Index t = T - 1; t >= 0; --t) {
    auto gi = tr.gates.row(t).segment(0, H).transpose().array();
    auto gf = tr.gates.row(t).segment(H, H).transpose().array();
    auto go = tr.gates.row(t).segment(2 * H, H).transpose().array();
    auto gg = tr.gates.row(t).segment(3 * H, H).transpose().array();
    auto ct = tr.cell_tanh.row(t).transpose().array();
    VectorX<Scalar> c_prev = t > 0 ? VectorX<Scalar>(tr.cells.row(t - 1).transpose()) : VectorX<Scalar>::Zero(H);

    auto dh = (d_hidden.row(t).transpose() + dh_next).array().eval();
    auto dc = (dh * go * (Scalar(1) - ct.square()) + dc_next.array()).eval();
    dz.row(t).segment(0, H) = sigmoid_grad(gi, dc * gg).transpose();
    dz.row(t).segment(H, H) = sigmoid_grad(gf, dc * c_prev.array()).transpose();
    dz.row(t).segment(2 * H, H) = sigmoid_grad(go, dh * ct).transpose();
    dz.row(t).segment(3 * H, H) = tanh_grad(gg, dc * gi).transpose();
    dc_next = (dc * gf).matrix();
    dh_next = U.transpose() * dz.row(t).transpose();
  }
  if (p.trainable) {
    p.W.grad.matrix().noalias() += dz.transpose() * inputs;
    if (T > 1) p.U.grad.matrix().noalias() += dz.bottomRows(T - 1).transpose() * tr.hidden.topRows(T - 1);
    p.b.grad.data() += dz.colwise().sum().transpose();
  }
  return dz * p.W.value.matrix();
}

/// Per-timestep states of both directions, aligned to token positions.
template <typename Scalar = double>
struct HiddenStateSequence {
  MatrixX<Scalar> forward_states;   // T x H
  MatrixX<Scalar> backward_states;  // T x H
  std::optional<VectorX<Scalar>> pooled;

  Index length() const { return forward_states.rows(); }
  Index hidden_dim() const { return forward_states.cols(); }
};

template <typename Scalar>
struct BiLstmTrace {
  LstmTrace<Scalar> forward;
  LstmTrace<Scalar> backward;  // over the reversed sequence
};

template <typename Scalar, typename Derived>
BiLstmTrace<Scalar> bilstm_trace(const Eigen::MatrixBase<Derived>& inputs, const LstmParams<Scalar>& fwd,
                                 const LstmParams<Scalar>& bwd) {
  if (fwd.hidden_dim != bwd.hidden_dim || fwd.input_dim != bwd.input_dim) {
    throw DimensionError("bilstm: forward and backward parameter shapes differ");
  }
  MatrixX<Scalar> reversed = inputs.colwise().reverse();
  return {lstm_trace(inputs, fwd), lstm_trace(reversed, bwd)};
}

/// Thought vector is the final forward state followed by the final
/// backward state (the one aligned with token 0).
template <typename Scalar>
HiddenStateSequence<Scalar> bilstm_states(const BiLstmTrace<Scalar>& tr) {
  HiddenStateSequence<Scalar> s{tr.forward.hidden, tr.backward.hidden.colwise().reverse(), std::nullopt};
  const Index T = s.length();
  if (T > 0) {
    VectorX<Scalar> pooled(2 * s.hidden_dim());
    pooled << s.forward_states.row(T - 1).transpose(), s.backward_states.row(0).transpose();
    s.pooled = std::move(pooled);
  }
  return s;
}

template <typename Scalar, typename Derived>
HiddenStateSequence<Scalar> bilstm_encode(const Eigen::MatrixBase<Derived>& inputs, const LstmParams<Scalar>& fwd,
                                          const LstmParams<Scalar>& bwd) {
  return bilstm_states(bilstm_trace(inputs, fwd, bwd));
}

/// Gradients of per-position states; returns dLoss/dinputs.
template <typename Scalar, typename Derived>
MatrixX<Scalar> bilstm_backward(LstmParams<Scalar>& fwd, LstmParams<Scalar>& bwd, const Eigen::MatrixBase<Derived>& inputs,
                                const BiLstmTrace<Scalar>& tr, const MatrixX<Scalar>& d_forward_states,
                                const MatrixX<Scalar>& d_backward_states) {
  MatrixX<Scalar> reversed = inputs.colwise().reverse();
  MatrixX<Scalar> d_rev = d_backward_states.colwise().reverse();
  MatrixX<Scalar> dx = lstm_backward(fwd, inputs, tr.forward, d_forward_states);
  dx += lstm_backward(bwd, reversed, tr.backward, d_rev).colwise().reverse();
  return dx;
}

/// Spreads a gradient on the pooled thought vector back to per-position states.
template <typename Scalar>
std::pair<MatrixX<Scalar>, MatrixX<Scalar>> pooled_backward(Index length, Index hidden_dim,
                                                            const VectorX<Scalar>& d_pooled) {
  MatrixX<Scalar> df = MatrixX<Scalar>::Zero(length, hidden_dim);
  MatrixX<Scalar> db = MatrixX<Scalar>::Zero(length, hidden_dim);
  df.row(length - 1) = d_pooled.head(hidden_dim).transpose();
  db.row(0) = d_pooled.tail(hidden_dim).transpose();
  return {std::move(df), std::move(db)};
}

/// Mean of the token vectors; with weights, the mean of weight-scaled
/// vectors (divided by the token count, not the weight sum).
template <typename Derived>
VectorX<typename Derived::Scalar> average_encode(const Eigen::MatrixBase<Derived>& vectors) {
  if (vectors.rows() == 0) throw DataError("average_encode: empty input sequence");
  return vectors.colwise().mean().transpose();
}

template <typename Derived, typename DerivedW>
VectorX<typename Derived::Scalar> average_encode(const Eigen::MatrixBase<Derived>& vectors,
                                                 const Eigen::MatrixBase<DerivedW>& weights) {
  using Scalar = typename Derived::Scalar;
  if (vectors.rows() == 0) throw DataError("average_encode: empty input sequence");
  if (weights.size() != vectors.rows()) throw DimensionError("average_encode: one weight per token required");
  return (weights.transpose() * vectors).transpose() / static_cast<Scalar>(vectors.rows());
}

/// Coordinate-wise maximum over timesteps.
template <typename Derived>
VectorX<typename Derived::Scalar> max_pool_states(const Eigen::MatrixBase<Derived>& states) {
  if (states.rows() == 0) throw DataError("max_pool_states: empty state sequence");
  return states.colwise().maxCoeff().transpose();
}

/// Concatenated forward/backward states, T x 2H.
template <typename Scalar>
MatrixX<Scalar> concat_states(const HiddenStateSequence<Scalar>& s) {
  MatrixX<Scalar> out(s.length(), 2 * s.hidden_dim());
  out << s.forward_states, s.backward_states;
  return out;
}

}  // namespace q2q

#endif  // Q2Q_ENCODERS_HPP_
