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

#ifndef Q2Q_INTERACTION_HPP_
#define Q2Q_INTERACTION_HPP_

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "q2q/encoders.hpp"
#include "q2q/errors.hpp"
#include "q2q/numerics.hpp"

namespace q2q {

template <typename Scalar = double>
struct SimTriplet {
  Scalar cosine;
  Scalar l2_distance;
  Scalar dot;
};

inline constexpr double kZeroNorm = 1e-12;

/// Cosine (0 when either norm is below 1e-12), Euclidean distance and dot
/// product of two state vectors.
template <typename DerivedA, typename DerivedB>
SimTriplet<typename DerivedA::Scalar> sim_triplet(const Eigen::MatrixBase<DerivedA>& a,
                                                  const Eigen::MatrixBase<DerivedB>& b) {
  using Scalar = typename DerivedA::Scalar;
  if (a.size() != b.size()) {
    throw DimensionError("sim_triplet: sizes " + std::to_string(a.size()) + " and " + std::to_string(b.size()));
  }
  Scalar dot = a.dot(b);
  Scalar na = a.norm();
  Scalar nb = b.norm();
  Scalar cosine = 0;
  if (na >= kZeroNorm && nb >= kZeroNorm) cosine = std::clamp(dot / (na * nb), Scalar(-1), Scalar(1));
  return {cosine, (a - b).norm(), dot};
}

/// Accumulates dLoss/da and dLoss/db given the gradient of each measure.
template <typename Scalar, typename DerivedA, typename DerivedB, typename OutA, typename OutB>
void sim_triplet_backward(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b,
                          const SimTriplet<Scalar>& grad, Eigen::MatrixBase<OutA>& da, Eigen::MatrixBase<OutB>& db) {
  da += grad.dot * b;
  db += grad.dot * a;
  Scalar na = a.norm();
  Scalar nb = b.norm();
  if (grad.cosine != 0 && na >= kZeroNorm && nb >= kZeroNorm) {
    Scalar cosine = a.dot(b) / (na * nb);
    da += grad.cosine * (b / (na * nb) - cosine * a / (na * na));
    db += grad.cosine * (a / (na * nb) - cosine * b / (nb * nb));
  }
  Scalar dist = (a - b).norm();
  if (grad.l2_distance != 0 && dist >= kZeroNorm) {
    da += grad.l2_distance * (a - b) / dist;
    db -= grad.l2_distance * (a - b) / dist;
  }
}

// Cube layout: four state views (forward, backward, concatenated, summed)
// times three measures (cosine, l2, dot), plus a valid-cell indicator.
inline constexpr Index kStateViews = 4;
inline constexpr Index kMeasureChannels = 3 * kStateViews;
inline constexpr Index kSimCubeChannels = kMeasureChannels + 1;
inline constexpr Index kIndicatorChannel = kMeasureChannels;
inline constexpr Index kFocusSelectChannel = 2 * 3;  // cosine on concatenated states

struct SimCubeOptions {
  Index max_len = 32;
  double cosine_fill = -1.0;
  double l2_fill = 1e3;
  double dot_fill = 0.0;
};

template <typename Scalar = double>
struct SimCube {
  Index channels = kSimCubeChannels;
  Index length1 = 0;
  Index length2 = 0;
  Index valid1 = 0;
  Index valid2 = 0;
  Tensor<Scalar> values;  // channels x length1 x length2
};

namespace detail {

template <typename Scalar>
VectorX<Scalar> state_view(const HiddenStateSequence<Scalar>& s, Index view, Index t) {
  switch (view) {
    case 0:
      return s.forward_states.row(t).transpose();
    case 1:
      return s.backward_states.row(t).transpose();
    case 2: {
      VectorX<Scalar> v(2 * s.hidden_dim());
      v << s.forward_states.row(t).transpose(), s.backward_states.row(t).transpose();
      return v;
    }
    default:
      return (s.forward_states.row(t) + s.backward_states.row(t)).transpose();
  }
}

}  // namespace detail

/// Pairwise similarity of every position of s1 against every position of
/// s2. Both axes are padded (or truncated) to options.max_len.
template <typename Scalar>
SimCube<Scalar> build_sim_cube(const HiddenStateSequence<Scalar>& s1, const HiddenStateSequence<Scalar>& s2,
                               const SimCubeOptions& options = {}) {
  if (s1.length() == 0 || s2.length() == 0) throw DataError("build_sim_cube: empty state sequence");
  if (s1.hidden_dim() != s2.hidden_dim()) throw DimensionError("build_sim_cube: hidden sizes differ");
  if (options.max_len <= 0) throw ConfigError("build_sim_cube: max_len must be positive");
  const Index L = options.max_len;
  SimCube<Scalar> cube;
  cube.length1 = cube.length2 = L;
  cube.valid1 = std::min(s1.length(), L);
  cube.valid2 = std::min(s2.length(), L);
  cube.values = Tensor<Scalar>({kSimCubeChannels, L, L});
  const Scalar fills[3] = {static_cast<Scalar>(options.cosine_fill), static_cast<Scalar>(options.l2_fill),
                           static_cast<Scalar>(options.dot_fill)};
  for (Index c = 0; c < kMeasureChannels; ++c) {
    for (Index i = 0; i < L; ++i) {
      for (Index j = 0; j < L; ++j) cube.values(c, i, j) = fills[c % 3];
    }
  }
  for (Index view = 0; view < kStateViews; ++view) {
    std::vector<VectorX<Scalar>> a(static_cast<std::size_t>(cube.valid1));
    std::vector<VectorX<Scalar>> b(static_cast<std::size_t>(cube.valid2));
    for (Index i = 0; i < cube.valid1; ++i) a[static_cast<std::size_t>(i)] = detail::state_view(s1, view, i);
    for (Index j = 0; j < cube.valid2; ++j) b[static_cast<std::size_t>(j)] = detail::state_view(s2, view, j);
    for (Index i = 0; i < cube.valid1; ++i) {
      for (Index j = 0; j < cube.valid2; ++j) {
        auto t = sim_triplet(a[static_cast<std::size_t>(i)], b[static_cast<std::size_t>(j)]);
        cube.values(3 * view, i, j) = t.cosine;
        cube.values(3 * view + 1, i, j) = t.l2_distance;
        cube.values(3 * view + 2, i, j) = t.dot;
      }
    }
  }
  for (Index i = 0; i < cube.valid1; ++i) {
    for (Index j = 0; j < cube.valid2; ++j) cube.values(kIndicatorChannel, i, j) = 1;
  }
  return cube;
}

template <typename Scalar>
struct StateGrads {
  MatrixX<Scalar> forward;
  MatrixX<Scalar> backward;
};

/// Gradient of the cube's valid cells back to both state sequences.
/// Padding cells are constants and contribute nothing.
template <typename Scalar>
std::pair<StateGrads<Scalar>, StateGrads<Scalar>> sim_cube_backward(const HiddenStateSequence<Scalar>& s1,
                                                                    const HiddenStateSequence<Scalar>& s2,
                                                                    const SimCube<Scalar>& cube,
                                                                    const Tensor<Scalar>& d_values) {
  require_same_shape(cube.values, d_values, "sim_cube_backward");
  const Index H = s1.hidden_dim();
  StateGrads<Scalar> g1{MatrixX<Scalar>::Zero(s1.length(), H), MatrixX<Scalar>::Zero(s1.length(), H)};
  StateGrads<Scalar> g2{MatrixX<Scalar>::Zero(s2.length(), H), MatrixX<Scalar>::Zero(s2.length(), H)};
  for (Index view = 0; view < kStateViews; ++view) {
    const Index width = view == 2 ? 2 * H : H;
    std::vector<VectorX<Scalar>> a(static_cast<std::size_t>(cube.valid1));
    std::vector<VectorX<Scalar>> b(static_cast<std::size_t>(cube.valid2));
    std::vector<VectorX<Scalar>> da(a.size(), VectorX<Scalar>::Zero(width));
    std::vector<VectorX<Scalar>> db(b.size(), VectorX<Scalar>::Zero(width));
    for (Index i = 0; i < cube.valid1; ++i) a[static_cast<std::size_t>(i)] = detail::state_view(s1, view, i);
    for (Index j = 0; j < cube.valid2; ++j) b[static_cast<std::size_t>(j)] = detail::state_view(s2, view, j);
    for (Index i = 0; i < cube.valid1; ++i) {
      for (Index j = 0; j < cube.valid2; ++j) {
        SimTriplet<Scalar> g{d_values(3 * view, i, j), d_values(3 * view + 1, i, j), d_values(3 * view + 2, i, j)};
        auto& dai = da[static_cast<std::size_t>(i)];
        auto& dbj = db[static_cast<std::size_t>(j)];
        sim_triplet_backward(a[static_cast<std::size_t>(i)], b[static_cast<std::size_t>(j)], g, dai, dbj);
      }
    }
    auto route = [&](StateGrads<Scalar>& g, const std::vector<VectorX<Scalar>>& d) {
      for (std::size_t t = 0; t < d.size(); ++t) {
        Index r = static_cast<Index>(t);
        switch (view) {
          case 0:
            g.forward.row(r) += d[t].transpose();
            break;
          case 1:
            g.backward.row(r) += d[t].transpose();
            break;
          case 2:
            g.forward.row(r) += d[t].head(H).transpose();
            g.backward.row(r) += d[t].tail(H).transpose();
            break;
          default:
            g.forward.row(r) += d[t].transpose();
            g.backward.row(r) += d[t].transpose();
        }
      }
    };
    route(g1, da);
    route(g2, db);
  }
  return {std::move(g1), std::move(g2)};
}

struct FocusOptions {
  double selected_weight = 1.0;
  double background_weight = 0.1;
};

template <typename Scalar = double>
struct FocusMask {
  MatrixX<Scalar> weights;                       // length1 x length2
  std::vector<std::pair<Index, Index>> selected;  // in selection order
};

/// Greedy matching on the concatenated-state cosine channel: valid cells
/// are visited in descending cosine order (ties in row-major order) and a
/// cell is kept when its row and column are both still free.
template <typename Scalar>
FocusMask<Scalar> focus_reweight(const SimCube<Scalar>& cube, const FocusOptions& options = {}) {
  struct Cell {
    Scalar value;
    Index i, j;
  };
  std::vector<Cell> cells;
  cells.reserve(static_cast<std::size_t>(cube.valid1 * cube.valid2));
  for (Index i = 0; i < cube.valid1; ++i) {
    for (Index j = 0; j < cube.valid2; ++j) cells.push_back({cube.values(kFocusSelectChannel, i, j), i, j});
  }
  std::stable_sort(cells.begin(), cells.end(), [](const Cell& a, const Cell& b) { return a.value > b.value; });
  FocusMask<Scalar> mask{MatrixX<Scalar>::Constant(cube.length1, cube.length2,
                                                   static_cast<Scalar>(options.background_weight)),
                         {}};
  std::vector<bool> row_used(static_cast<std::size_t>(cube.length1), false);
  std::vector<bool> col_used(static_cast<std::size_t>(cube.length2), false);
  for (const Cell& c : cells) {
    if (row_used[static_cast<std::size_t>(c.i)] || col_used[static_cast<std::size_t>(c.j)]) continue;
    row_used[static_cast<std::size_t>(c.i)] = col_used[static_cast<std::size_t>(c.j)] = true;
    mask.weights(c.i, c.j) = static_cast<Scalar>(options.selected_weight);
    mask.selected.emplace_back(c.i, c.j);
  }
  return mask;
}

/// focusCube: measure channels scaled by the mask, indicator untouched.
template <typename Scalar>
Tensor<Scalar> apply_focus(const SimCube<Scalar>& cube, const FocusMask<Scalar>& mask) {
  Tensor<Scalar> out = cube.values;
  const Index plane = cube.length1 * cube.length2;
  RowMatrixX<Scalar> w = mask.weights;
  Eigen::Map<const VectorX<Scalar>> flat(w.data(), plane);
  for (Index c = 0; c < kMeasureChannels; ++c) out.data().segment(c * plane, plane).array() *= flat.array();
  return out;
}

template <typename Scalar>
Tensor<Scalar> apply_focus_backward(const SimCube<Scalar>& cube, const FocusMask<Scalar>& mask,
                                    const Tensor<Scalar>& d_focus) {
  SimCube<Scalar> as_cube = cube;
  as_cube.values = d_focus;
  return apply_focus(as_cube, mask);
}

// Residual convolutional classifier over the focusCube.

struct ConvClassifierConfig {
  Index in_channels = kSimCubeChannels;
  Index depth = 19;  // conv layers: one stem plus two per residual block
  Index fmaps = 32;
  Index fc_units = 128;
};

template <typename Scalar = double>
struct ConvClassifierParams {
  struct Block {
    Parameter<Scalar> k1, b1, k2, b2;
  };

  ConvClassifierConfig config;
  Parameter<Scalar> stem_k, stem_b;
  std::vector<Block> blocks;
  Parameter<Scalar> fc1_w, fc1_b, fc2_w, fc2_b, out_w, out_b;

  static ConvClassifierParams zeros(const ConvClassifierConfig& cfg, const std::string& prefix = "cls") {
    if (cfg.depth < 1 || cfg.depth % 2 == 0) {
      throw ConfigError("conv classifier depth must be odd (stem + 2 per residual block), got " +
                        std::to_string(cfg.depth));
    }
    if (cfg.in_channels <= 0 || cfg.fmaps <= 0 || cfg.fc_units <= 0) {
      throw ConfigError("conv classifier sizes must be positive");
    }
    ConvClassifierParams p;
    p.config = cfg;
    const Index F = cfg.fmaps;
    const Index U = cfg.fc_units;
    p.stem_k = Parameter<Scalar>(prefix + ".stem.k", {F, cfg.in_channels, 3, 3}, true, true);
    p.stem_b = Parameter<Scalar>(prefix + ".stem.b", {F}, true, false);
    for (Index i = 0; i < (cfg.depth - 1) / 2; ++i) {
      std::string n = prefix + ".block" + std::to_string(i);
      p.blocks.push_back({Parameter<Scalar>(n + ".k1", {F, F, 3, 3}, true, true),
                          Parameter<Scalar>(n + ".b1", {F}, true, false),
                          Parameter<Scalar>(n + ".k2", {F, F, 3, 3}, true, true),
                          Parameter<Scalar>(n + ".b2", {F}, true, false)});
    }
    p.fc1_w = Parameter<Scalar>(prefix + ".fc1.w", {U, F}, true, true);
    p.fc1_b = Parameter<Scalar>(prefix + ".fc1.b", {U}, true, false);
    p.fc2_w = Parameter<Scalar>(prefix + ".fc2.w", {U, U}, true, true);
    p.fc2_b = Parameter<Scalar>(prefix + ".fc2.b", {U}, true, false);
    p.out_w = Parameter<Scalar>(prefix + ".out.w", {2, U}, true, true);
    p.out_b = Parameter<Scalar>(prefix + ".out.b", {2}, true, false);
    return p;
  }

  void init(Rng& rng) {
    fill_fan_in(stem_k, config.in_channels * 9, rng);
    for (auto& b : blocks) {
      fill_fan_in(b.k1, config.fmaps * 9, rng);
      fill_fan_in(b.k2, config.fmaps * 9, rng);
    }
    fill_fan_in(fc1_w, config.fmaps, rng);
    fill_fan_in(fc2_w, config.fc_units, rng);
    fill_fan_in(out_w, config.fc_units, rng);
  }

  ParameterRefs<Scalar> parameters() {
    ParameterRefs<Scalar> refs{&stem_k, &stem_b};
    for (auto& b : blocks) refs.insert(refs.end(), {&b.k1, &b.b1, &b.k2, &b.b2});
    refs.insert(refs.end(), {&fc1_w, &fc1_b, &fc2_w, &fc2_b, &out_w, &out_b});
    return refs;
  }
};

template <typename Scalar>
struct ClassifierTrace {
  struct BlockTrace {
    Tensor<Scalar> in, z1, r, sum;
  };
  Tensor<Scalar> input, stem_z;
  std::vector<BlockTrace> blocks;
  Tensor<Scalar> features;  // output of the last residual stage
  std::vector<Index> pool_argmax;
  VectorX<Scalar> pooled, z1, h1, z2, h2;
  Tensor<Scalar> log_probs;
};

namespace detail {

template <typename Scalar>
Tensor<Scalar> conv_bias(const Tensor<Scalar>& x, const Parameter<Scalar>& k, const Parameter<Scalar>& b) {
  Tensor<Scalar> z = conv2d(x, k.value, 1, 1);
  z.matrix(z.dim(0), z.dim(1) * z.dim(2)).colwise() += b.value.data();
  return z;
}

template <typename Scalar>
Tensor<Scalar> conv_bias_backward(const Tensor<Scalar>& x, Parameter<Scalar>& k, Parameter<Scalar>& b,
                                  const Tensor<Scalar>& dz) {
  auto g = conv2d_backward(x, k.value, dz, 1, 1);
  k.grad.data() += g.kernels.data();
  b.grad.data() += dz.matrix(dz.dim(0), dz.dim(1) * dz.dim(2)).rowwise().sum();
  return std::move(g.input);
}

}  // namespace detail

template <typename Scalar>
ClassifierTrace<Scalar> classify_trace(const Tensor<Scalar>& input, const ConvClassifierParams<Scalar>& p) {
  if (input.rank() != 3 || input.dim(0) != p.config.in_channels) {
    throw DimensionError("classify: input " + shape_string(input.shape()) + " does not have " +
                         std::to_string(p.config.in_channels) + " channels");
  }
  ClassifierTrace<Scalar> tr;
  tr.input = input;
  tr.stem_z = detail::conv_bias(input, p.stem_k, p.stem_b);
  Tensor<Scalar> a = relu(tr.stem_z);
  for (const auto& blk : p.blocks) {
    typename ClassifierTrace<Scalar>::BlockTrace bt;
    bt.in = a;
    bt.z1 = detail::conv_bias(a, blk.k1, blk.b1);
    bt.r = relu(bt.z1);
    bt.sum = add(a, detail::conv_bias(bt.r, blk.k2, blk.b2));
    a = relu(bt.sum);
    tr.blocks.push_back(std::move(bt));
  }
  tr.features = a;
  const Index F = a.dim(0);
  Tensor<Scalar> flat({F, a.dim(1) * a.dim(2)}, a.data());
  auto pooled = max_pool(flat, 1);
  tr.pool_argmax = std::move(pooled.argmax);
  tr.pooled = pooled.values.data();
  tr.z1 = p.fc1_w.value.matrix() * tr.pooled + p.fc1_b.value.data();
  tr.h1 = relu(tr.z1.array()).matrix();
  tr.z2 = p.fc2_w.value.matrix() * tr.h1 + p.fc2_b.value.data();
  tr.h2 = relu(tr.z2.array()).matrix();
  VectorX<Scalar> logits = p.out_w.value.matrix() * tr.h2 + p.out_b.value.data();
  tr.log_probs = log_softmax(Tensor<Scalar>::from_vector(logits));
  return tr;
}

/// Residual conv stack, global max pool, two relu fully-connected layers
/// and a 2-way log-softmax.
template <typename Scalar>
Tensor<Scalar> classify(const Tensor<Scalar>& input, const ConvClassifierParams<Scalar>& p) {
  return classify_trace(input, p).log_probs;
}

/// Accumulates parameter gradients; returns dLoss/dinput.
template <typename Scalar>
Tensor<Scalar> classify_backward(ConvClassifierParams<Scalar>& p, const ClassifierTrace<Scalar>& tr,
                                 const Tensor<Scalar>& d_log_probs) {
  VectorX<Scalar> dlogits = log_softmax_backward(tr.log_probs, d_log_probs).data();
  p.out_w.grad.matrix() += dlogits * tr.h2.transpose();
  p.out_b.grad.data() += dlogits;
  VectorX<Scalar> dz2 = relu_grad(tr.z2.array(), (p.out_w.value.matrix().transpose() * dlogits).array()).matrix();
  p.fc2_w.grad.matrix() += dz2 * tr.h1.transpose();
  p.fc2_b.grad.data() += dz2;
  VectorX<Scalar> dz1 = relu_grad(tr.z1.array(), (p.fc2_w.value.matrix().transpose() * dz2).array()).matrix();
  p.fc1_w.grad.matrix() += dz1 * tr.pooled.transpose();
  p.fc1_b.grad.data() += dz1;
  VectorX<Scalar> dpooled = p.fc1_w.value.matrix().transpose() * dz1;

  const Tensor<Scalar>& a = tr.features;
  Shape flat_shape{a.dim(0), a.dim(1) * a.dim(2)};
  Tensor<Scalar> da_flat = max_pool_backward(flat_shape, 1, tr.pool_argmax, Tensor<Scalar>::from_vector(dpooled));
  Tensor<Scalar> da(a.shape(), da_flat.data());
  for (std::size_t i = p.blocks.size(); i-- > 0;) {
    auto& blk = p.blocks[i];
    const auto& bt = tr.blocks[i];
    Tensor<Scalar> dsum = relu_backward(bt.sum, da);
    Tensor<Scalar> dr = detail::conv_bias_backward(bt.r, blk.k2, blk.b2, dsum);
    Tensor<Scalar> dz1c = relu_backward(bt.z1, dr);
    Tensor<Scalar> din = detail::conv_bias_backward(bt.in, blk.k1, blk.b1, dz1c);
    da = add(dsum, din);
  }
  Tensor<Scalar> dstem = relu_backward(tr.stem_z, da);
  return detail::conv_bias_backward(tr.input, p.stem_k, p.stem_b, dstem);
}

}  // namespace q2q

#endif  // Q2Q_INTERACTION_HPP_
