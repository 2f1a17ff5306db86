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
#include <span>
#include <vector>

namespace replay_opt::nn {

class Mlp;
struct GradTape;

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Moment estimates for one parameter vector.
struct AdamState {
  std::vector<double> first_moment;
  std::vector<double> second_moment;
  std::uint64_t step_count = 0;
  AdamConfig config;

  AdamState() = default;
  AdamState(std::size_t param_count, AdamConfig cfg)
      : first_moment(param_count, 0.0), second_moment(param_count, 0.0), config(cfg) {}
};

/// One bias-corrected Adam descent step: params -= lr * m_hat / (sqrt(v_hat) + eps).
/// Throws NumericFault if any gradient is non-finite (nothing is modified
/// in that case).
void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state);

/// Same, for a network; the fault message names the offending layer.
void adam_step(Mlp& net, const GradTape& tape, AdamState& state);

}  // namespace replay_opt::nn
