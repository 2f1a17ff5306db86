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

#include "replay_opt/ddpg/agent.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "replay_opt/common/errors.hpp"

namespace replay_opt::ddpg {

namespace {

nn::Mlp make_net(std::size_t in, const std::vector<std::size_t>& hidden, std::size_t out, nn::Activation head,
                 std::uint64_t seed, double output_init) {
  std::vector<std::size_t> sizes{in};
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(out);
  std::vector<nn::Activation> acts(hidden.size(), nn::Activation::kRelu);
  acts.push_back(head);
  return nn::Mlp(std::move(sizes), std::move(acts), seed, nn::InitScheme{output_init});
}

}  // namespace

Batch gather_batch(const replay::ReplayBuffer& buffer, std::span<const replay::SlotRef> refs) {
  const std::size_t n = refs.size();
  Batch b;
  b.states.resize(n, buffer.obs_dim());
  b.actions.resize(n, buffer.action_dim());
  b.next_states.resize(n, buffer.obs_dim());
  b.rewards.resize(n);
  b.done.resize(n);
  for (std::size_t r = 0; r < n; ++r) {
    const replay::Transition& t = buffer.at(refs[r].index);
    std::copy(t.state.begin(), t.state.end(), b.states.row(r).begin());
    std::copy(t.action.begin(), t.action.end(), b.actions.row(r).begin());
    std::copy(t.next_state.begin(), t.next_state.end(), b.next_states.row(r).begin());
    b.rewards[r] = t.reward;
    b.done[r] = t.done ? 1 : 0;
  }
  return b;
}

DdpgAgent::DdpgAgent(const envs::EnvSpec& spec, DdpgConfig config, std::uint64_t init_seed)
    : spec_(spec), config_(std::move(config)) {
  if (spec_.obs_dim == 0 || spec_.action_dim == 0) throw ConfigError("DdpgAgent: empty observation/action space");
  if (!(config_.gamma > 0.0 && config_.gamma < 1.0)) throw ConfigError("DdpgAgent: gamma must be in (0, 1)");
  if (!(config_.tau > 0.0 && config_.tau <= 1.0)) throw ConfigError("DdpgAgent: tau must be in (0, 1]");
  for (std::size_t i = 0; i < spec_.action_dim; ++i) {
    center_.push_back(0.5 * (spec_.action_high[i] + spec_.action_low[i]));
    half_range_.push_back(0.5 * (spec_.action_high[i] - spec_.action_low[i]));
  }
  actor_ = make_net(spec_.obs_dim, config_.hidden, spec_.action_dim, nn::Activation::kTanh,
                    substream_seed(init_seed, "actor"), config_.output_init);
  critic_ = make_net(spec_.obs_dim + spec_.action_dim, config_.hidden, 1, nn::Activation::kLinear,
                     substream_seed(init_seed, "critic"), config_.output_init);
  target_actor_ = actor_;
  target_critic_ = critic_;
  actor_adam_ = nn::AdamState(actor_.param_count(), nn::AdamConfig{config_.actor_lr});
  critic_adam_ = nn::AdamState(critic_.param_count(), nn::AdamConfig{config_.critic_lr});
}

void DdpgAgent::scale_actions(nn::Matrix& raw) const {
  for (std::size_t r = 0; r < raw.rows(); ++r) {
    auto row = raw.row(r);
    for (std::size_t i = 0; i < row.size(); ++i) row[i] = center_[i] + half_range_[i] * row[i];
  }
}

std::vector<double> DdpgAgent::act(std::span<const double> obs, OuNoise* noise, Rng* rng) const {
  if (obs.size() != spec_.obs_dim) throw ContractViolation("DdpgAgent::act: observation width mismatch");
  nn::Matrix x(1, obs.size());
  std::copy(obs.begin(), obs.end(), x.row(0).begin());
  nn::Matrix a = actor_.forward(x);
  scale_actions(a);
  std::vector<double> action(a.row(0).begin(), a.row(0).end());
  if (noise != nullptr) {
    if (rng == nullptr) throw ContractViolation("DdpgAgent::act: noise requires an rng");
    const auto n = noise->sample(*rng);
    for (std::size_t i = 0; i < action.size(); ++i) action[i] += n[i];
  }
  for (std::size_t i = 0; i < action.size(); ++i) {
    action[i] = std::clamp(action[i], spec_.action_low[i], spec_.action_high[i]);
  }
  return action;
}

nn::Matrix DdpgAgent::critic_input(const nn::Matrix& states, const nn::Matrix& actions) const {
  const std::size_t obs = states.cols();
  nn::Matrix x(states.rows(), obs + actions.cols());
  for (std::size_t r = 0; r < states.rows(); ++r) {
    auto dst = x.row(r);
    std::copy(states.row(r).begin(), states.row(r).end(), dst.begin());
    std::copy(actions.row(r).begin(), actions.row(r).end(), dst.begin() + static_cast<std::ptrdiff_t>(obs));
  }
  return x;
}

std::vector<double> DdpgAgent::critic_targets(const Batch& batch) const {
  nn::Matrix next_actions = target_actor_.forward(batch.next_states);
  scale_actions(next_actions);
  const nn::Matrix q_next = target_critic_.forward(critic_input(batch.next_states, next_actions));
  std::vector<double> y(batch.size());
  for (std::size_t t = 0; t < batch.size(); ++t) {
    const double not_done = batch.done[t] ? 0.0 : 1.0;
    y[t] = batch.rewards[t] + config_.gamma * not_done * q_next(t, 0);
  }
  return y;
}

double DdpgAgent::critic_loss(const Batch& batch, std::span<const double> targets, std::span<const double> weights,
                              nn::GradTape* tape, std::vector<double>* td_errors) const {
  const std::size_t n = batch.size();
  if (n == 0) throw ContractViolation("critic_loss: empty batch");
  if (targets.size() != n || (!weights.empty() && weights.size() != n)) {
    throw ContractViolation("critic_loss: targets/weights do not match the batch");
  }
  nn::ForwardCache cache;
  const nn::Matrix& q = critic_.forward(critic_input(batch.states, batch.actions), cache);
  const double inv_n = 1.0 / static_cast<double>(n);
  double loss = 0.0;
  nn::Matrix grad(n, 1);
  if (td_errors != nullptr) td_errors->resize(n);
  for (std::size_t t = 0; t < n; ++t) {
    const double delta = targets[t] - q(t, 0);
    const double w = weights.empty() ? 1.0 : weights[t];
    loss += w * delta * delta;
    grad(t, 0) = -2.0 * w * delta * inv_n;
    if (td_errors != nullptr) (*td_errors)[t] = delta;
  }
  loss *= inv_n;
  if (tape != nullptr) critic_.backward(cache, grad, *tape);
  return loss;
}

double DdpgAgent::actor_objective(const Batch& batch, nn::GradTape* tape) const {
  const std::size_t n = batch.size();
  if (n == 0) throw ContractViolation("actor_objective: empty batch");
  nn::ForwardCache actor_cache;
  nn::Matrix actions = actor_.forward(batch.states, actor_cache);
  scale_actions(actions);
  nn::ForwardCache critic_cache;
  const nn::Matrix& q = critic_.forward(critic_input(batch.states, actions), critic_cache);
  double objective = 0.0;
  for (std::size_t t = 0; t < n; ++t) objective += q(t, 0);
  objective /= static_cast<double>(n);
  if (tape == nullptr) return objective;

  // d(-mean Q)/dQ = -1/N; back through the frozen critic to its action
  // inputs, then through the action scaling into the actor.
  nn::Matrix q_grad(n, 1, -1.0 / static_cast<double>(n));
  nn::GradTape critic_tape;
  critic_.backward(critic_cache, q_grad, critic_tape, /*param_grads=*/false);
  const std::size_t obs = spec_.obs_dim;
  nn::Matrix action_grad(n, spec_.action_dim);
  for (std::size_t t = 0; t < n; ++t) {
    for (std::size_t i = 0; i < spec_.action_dim; ++i) {
      action_grad(t, i) = critic_tape.input(t, obs + i) * half_range_[i];
    }
  }
  actor_.backward(actor_cache, action_grad, *tape);
  return objective;
}

CriticUpdate DdpgAgent::critic_update(const Batch& batch, std::span<const double> weights) {
  const std::vector<double> y = critic_targets(batch);
  CriticUpdate out;
  nn::GradTape tape = critic_.make_tape();
  out.loss = critic_loss(batch, y, weights, &tape, &out.td_errors);
  if (!std::isfinite(out.loss)) throw NumericFault("critic loss is not finite");
  nn::adam_step(critic_, tape, critic_adam_);
  return out;
}

double DdpgAgent::actor_update(const Batch& batch) {
  nn::GradTape tape = actor_.make_tape();
  const double objective = actor_objective(batch, &tape);
  if (!std::isfinite(objective)) throw NumericFault("actor objective is not finite");
  nn::adam_step(actor_, tape, actor_adam_);
  return objective;
}

void soft_update(const nn::Mlp& online, nn::Mlp& target, double tau) {
  const auto src = online.params();
  auto dst = target.params();
  if (src.size() != dst.size()) throw ContractViolation("soft_update: parameter counts differ");
  const double keep = 1.0 - tau;
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = tau * src[i] + keep * dst[i];
}

void DdpgAgent::soft_update() {
  ddpg::soft_update(actor_, target_actor_, config_.tau);
  ddpg::soft_update(critic_, target_critic_, config_.tau);
}

TrainStepResult DdpgAgent::train_step(replay::Sampler& sampler, replay::ReplayBuffer& buffer,
                                      std::size_t batch_size, Rng& rng) {
  if (buffer.empty()) throw replay_opt::EmptyBufferError();
  replay::SampledBatch sampled = sampler.sample(buffer, batch_size, rng);
  const Batch batch = gather_batch(buffer, sampled.slots);
  TrainStepResult out;
  CriticUpdate critic = critic_update(batch, sampled.is_weights);
  out.critic_loss = critic.loss;
  out.td_errors = std::move(critic.td_errors);
  out.actor_objective = actor_update(batch);
  soft_update();
  out.slots = std::move(sampled.slots);
  return out;
}

}  // namespace replay_opt::ddpg
