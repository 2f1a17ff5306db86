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

#include "replay_opt/common/rng.hpp"
#include "replay_opt/ddpg/ou_noise.hpp"
#include "replay_opt/envs/env.hpp"
#include "replay_opt/nn/adam.hpp"
#include "replay_opt/nn/mlp.hpp"
#include "replay_opt/replay/buffer.hpp"
#include "replay_opt/replay/sampler.hpp"

namespace replay_opt::ddpg {

struct DdpgConfig {
  std::vector<std::size_t> hidden{64, 64};
  double actor_lr = 1e-4;
  double critic_lr = 1e-3;
  double gamma = 0.99;
  double tau = 0.001;
  /// Output-layer init range for actor and critic heads.
  double output_init = 3e-3;
};

/// Training tensors gathered from the buffer for one batch.
struct Batch {
  nn::Matrix states;
  nn::Matrix actions;
  nn::Matrix next_states;
  std::vector<double> rewards;
  std::vector<std::uint8_t> done;

  std::size_t size() const { return rewards.size(); }
};

Batch gather_batch(const replay::ReplayBuffer& buffer, std::span<const replay::SlotRef> refs);

struct CriticUpdate {
  double loss = 0.0;
  /// y - Q(s, a) per sample, with the parameters from before the step.
  std::vector<double> td_errors;
};

struct TrainStepResult {
  double critic_loss = 0.0;
  double actor_objective = 0.0;
  std::vector<double> td_errors;
  std::vector<replay::SlotRef> slots;
};

/// Deep deterministic policy gradient agent: actor mu(s), critic Q(s, a),
/// slowly blended target copies of both, and their Adam states.
///
/// The actor is obs -> hidden (relu) -> action_dim (tanh), rescaled to the
/// action box. The critic takes [obs, action] at its first layer and has a
/// linear scalar head.
class DdpgAgent {
 public:
  DdpgAgent(const envs::EnvSpec& spec, DdpgConfig config, std::uint64_t init_seed);

  const DdpgConfig& config() const { return config_; }
  const envs::EnvSpec& env_spec() const { return spec_; }

  nn::Mlp& actor() { return actor_; }
  nn::Mlp& critic() { return critic_; }
  nn::Mlp& target_actor() { return target_actor_; }
  nn::Mlp& target_critic() { return target_critic_; }
  const nn::Mlp& actor() const { return actor_; }
  const nn::Mlp& critic() const { return critic_; }
  const nn::Mlp& target_actor() const { return target_actor_; }
  const nn::Mlp& target_critic() const { return target_critic_; }
  const nn::AdamState& actor_optimizer() const { return actor_adam_; }
  const nn::AdamState& critic_optimizer() const { return critic_adam_; }

  /// clamp(center + half_range * mu(obs) + noise, low, high). When `noise`
  /// is given it is advanced by one step using `rng`.
  std::vector<double> act(std::span<const double> obs, OuNoise* noise = nullptr, Rng* rng = nullptr) const;

  /// Maps actor outputs (in [-1, 1]) to the action box.
  void scale_actions(nn::Matrix& raw) const;

  /// Bootstrapped targets y = r + gamma * (1 - done) * Q'(s', mu'(s')).
  std::vector<double> critic_targets(const Batch& batch) const;

  /// (1/N) sum_t w_t (y_t - Q(s_t, a_t))^2 for the given targets; weights
  /// may be empty (all ones). Accumulates d loss / d theta_Q into `tape`
  /// and writes y - Q into `td_errors` when given.
  double critic_loss(const Batch& batch, std::span<const double> targets, std::span<const double> weights,
                     nn::GradTape* tape = nullptr, std::vector<double>* td_errors = nullptr) const;

  /// mean_t Q(s_t, mu(s_t)). With `tape`, accumulates the gradient of the
  /// *negated* objective w.r.t. the actor parameters (critic frozen).
  double actor_objective(const Batch& batch, nn::GradTape* tape = nullptr) const;

  /// One Adam step on the critic. Throws NumericFault on a non-finite loss.
  CriticUpdate critic_update(const Batch& batch, std::span<const double> weights = {});
  /// One Adam ascent step on the actor objective; returns it before the step.
  double actor_update(const Batch& batch);
  /// target <- tau * online + (1 - tau) * target, for both networks.
  void soft_update();

  /// Sample, critic step, actor step, soft update. IS weights from
  /// prioritized samplers scale the critic loss; other samplers are
  /// unweighted.
  TrainStepResult train_step(replay::Sampler& sampler, replay::ReplayBuffer& buffer, std::size_t batch_size,
                             Rng& rng);

 private:
  nn::Matrix critic_input(const nn::Matrix& states, const nn::Matrix& actions) const;

  envs::EnvSpec spec_;
  DdpgConfig config_;
  std::vector<double> center_;
  std::vector<double> half_range_;
  nn::Mlp actor_;
  nn::Mlp critic_;
  nn::Mlp target_actor_;
  nn::Mlp target_critic_;
  nn::AdamState actor_adam_;
  nn::AdamState critic_adam_;
};

/// target <- tau * online + (1 - tau) * target, parameter by parameter.
void soft_update(const nn::Mlp& online, nn::Mlp& target, double tau);

}  // namespace replay_opt::ddpg
