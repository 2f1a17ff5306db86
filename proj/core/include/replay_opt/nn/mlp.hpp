// Copyright 2026 The replay-opt Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "replay_opt/nn/matrix.hpp"

namespace replay_opt::nn {

enum class Activation { kLinear, kTanh, kRelu, kSigmoid };

std::string_view to_string(Activation a);

/// Sigmoid outputs are clamped to [kSigmoidFloor, 1 - kSigmoidFloor] so that
/// scores stay strictly inside (0, 1) even when the pre-activation saturates.
inline constexpr double kSigmoidFloor = 1e-15;

/// Initialization scheme. Hidden layers draw from U(-1/sqrt(fan_in),
/// +1/sqrt(fan_in)); the output layer uses the same unless `output_range`
/// is set, in which case it draws from U(-output_range, +output_range).
struct InitScheme {
  std::optional<double> output_range;
};

/// Intermediates kept by a forward pass for the matching backward pass.
struct ForwardCache {
  /// values[0] is the input; values[l + 1] is the post-activation output
  /// of layer l.
  std::vector<Matrix> values;
  /// pre[l] is the affine output of layer l before its activation.
  std::vector<Matrix> pre;
};

/// Gradient accumulator for one Mlp: d loss / d params (flat, aligned with
/// Mlp::params()) and d loss / d input.
struct GradTape {
  std::vector<double> params;
  Matrix input;

  explicit GradTape(std::size_t param_count = 0) : params(param_count, 0.0) {}

  void zero();
};

/// Feed-forward network with explicit flat parameter storage. Layer l has a
/// weight block of in_l * out_l entries (row-major, input-major: w[i * out + j])
/// followed by out_l biases.
class Mlp {
 public:
  Mlp() = default;

  /// layer_sizes = {input, hidden..., output}; one activation per non-input
  /// layer. Throws ConfigError on an invalid spec.
  Mlp(std::vector<std::size_t> layer_sizes, std::vector<Activation> activations,
      std::uint64_t seed, InitScheme init = {});

  /// Same shapes, all parameters zero.
  static Mlp zeros(std::vector<std::size_t> layer_sizes, std::vector<Activation> activations);

  std::size_t input_width() const { return sizes_.front(); }
  std::size_t output_width() const { return sizes_.back(); }
  std::size_t layer_count() const { return activations_.size(); }
  const std::vector<std::size_t>& layer_sizes() const { return sizes_; }
  const std::vector<Activation>& activations() const { return activations_; }

  std::size_t param_count() const { return params_.size(); }
  std::span<double> params() { return params_; }
  std::span<const double> params() const { return params_; }

  /// Offset of layer l's weight block inside params(); biases follow at
  /// weight_offset(l) + in_l * out_l.
  std::size_t weight_offset(std::size_t layer) const { return offsets_[layer]; }
  /// Layer index owning flat parameter `p`.
  std::size_t layer_of(std::size_t p) const;

  double& weight(std::size_t layer, std::size_t in, std::size_t out);
  double& bias(std::size_t layer, std::size_t out);

  /// Forward pass over a batch (one sample per row).
  Matrix forward(const Matrix& batch) const;
  /// Forward pass that also fills `cache` for backward().
  const Matrix& forward(const Matrix& batch, ForwardCache& cache) const;

  /// Backpropagates `output_grad` (d loss / d output, same shape as the
  /// forward output) and *accumulates* into `tape`. With
  /// `param_grads == false` only the input gradient is produced.
  void backward(const ForwardCache& cache, const Matrix& output_grad, GradTape& tape,
                bool param_grads = true) const;

  /// Smallest |pre-activation| over all relu units for this batch; +inf if
  /// the net has no relu layer. Used to keep finite-difference probes away
  /// from kinks.
  double min_abs_relu_preactivation(const Matrix& batch) const;

  GradTape make_tape() const { return GradTape(param_count()); }

  bool operator==(const Mlp&) const = default;

 private:
  std::vector<std::size_t> sizes_;
  std::vector<Activation> activations_;
  std::vector<std::size_t> offsets_;
  std::vector<double> params_;
};

}  // namespace replay_opt::nn
