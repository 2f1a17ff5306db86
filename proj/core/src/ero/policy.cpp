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

#include "replay_opt/ero/policy.hpp"

#include <algorithm>
#include <cmath>

#include "replay_opt/common/errors.hpp"

namespace replay_opt::ero {

namespace {

nn::Mlp make_score_net(const EroConfig& config, std::uint64_t seed) {
  std::vector<std::size_t> sizes{kFeatureDim};
  sizes.insert(sizes.end(), config.hidden.begin(), config.hidden.end());
  sizes.push_back(1);
  std::vector<nn::Activation> acts(config.hidden.size(), nn::Activation::kRelu);
  acts.push_back(nn::Activation::kSigmoid);
  return nn::Mlp(std::move(sizes), std::move(acts), seed, nn::InitScheme{3e-3});
}

// Rows are scored in chunks during a full refresh to bound cache memory.
constexpr std::size_t kScoreChunk = 512;

}  // namespace

EroPolicy::EroPolicy(EroConfig config, std::uint64_t init_seed)
    : config_(std::move(config)),
      net_(make_score_net(config_, init_seed)),
      adam_(net_.param_count(), nn::AdamConfig{config_.learning_rate}) {
  if (config_.batch_size == 0) throw ConfigError("EroConfig: batch_size must be positive");
}

FeatureVector EroPolicy::features(const replay::Transition& t, std::uint64_t current_step) const {
  return normalizer_.normalize(raw_features(t, current_step));
}

double EroPolicy::score(const FeatureVector& normalized) const {
  nn::Matrix x(1, kFeatureDim);
  std::copy(normalized.begin(), normalized.end(), x.row(0).begin());
  return net_.forward(x)(0, 0);
}

std::vector<double> EroPolicy::score(const nn::Matrix& normalized) const {
  const nn::Matrix out = net_.forward(normalized);
  return {out.data().begin(), out.data().end()};
}

nn::Matrix EroPolicy::feature_matrix(const replay::ReplayBuffer& buffer, std::span<const std::size_t> slots,
                                     std::uint64_t current_step) const {
  nn::Matrix x(slots.size(), kFeatureDim);
  for (std::size_t r = 0; r < slots.size(); ++r) {
    const FeatureVector f = features(buffer.at(slots[r]), current_step);
    std::copy(f.begin(), f.end(), x.row(r).begin());
  }
  return x;
}

void EroPolicy::on_store(replay::ReplayBuffer& buffer, std::size_t slot, std::uint64_t current_step) {
  replay::Transition& t = buffer.at(slot);
  const TransitionFeatures raw = raw_features(t, current_step);
  normalizer_.observe(raw);
  t.priority_score = score(normalizer_.normalize(raw));
}

void EroPolicy::rescore(replay::ReplayBuffer& buffer, std::span<const std::size_t> slots) {
  const nn::Matrix x = feature_matrix(buffer, slots, current_step_);
  const std::vector<double> lambda = score(x);
  for (std::size_t k = 0; k < slots.size(); ++k) buffer.at(slots[k]).priority_score = lambda[k];
}

std::size_t EroPolicy::refresh_subset(replay::ReplayBuffer& buffer, Rng& rng, std::uint64_t current_step) {
  const std::size_t n = buffer.size();
  if (n == 0) return 0;
  if (!config_.lazy_refresh) {
    std::vector<std::size_t> chunk;
    nn::ForwardCache cache;
    for (std::size_t begin = 0; begin < n; begin += kScoreChunk) {
      const std::size_t end = std::min(n, begin + kScoreChunk);
      chunk.resize(end - begin);
      for (std::size_t k = begin; k < end; ++k) chunk[k - begin] = k;
      const nn::Matrix& lambda = net_.forward(feature_matrix(buffer, chunk, current_step), cache);
      for (std::size_t k = begin; k < end; ++k) buffer.at(k).priority_score = lambda(k - begin, 0);
    }
  }
  std::vector<std::uint8_t> bits(n);
  for (std::size_t slot = 0; slot < n; ++slot) bits[slot] = rng.bernoulli(buffer.at(slot).priority_score) ? 1 : 0;
  buffer.apply_mask(bits);
  return buffer.subset_size();
}

double EroPolicy::surrogate_loss(const nn::Matrix& features, std::span<const std::uint8_t> bits,
                                 double replay_reward, nn::GradTape* tape) const {
  if (features.rows() != bits.size()) throw ContractViolation("surrogate_loss: one mask bit per row required");
  nn::ForwardCache cache;
  const nn::Matrix& phi = net_.forward(features, cache);
  double log_lik = 0.0;
  nn::Matrix grad(phi.rows(), 1);
  for (std::size_t j = 0; j < phi.rows(); ++j) {
    const double p = phi(j, 0);
    const double pc = std::clamp(p, kLogClamp, 1.0 - kLogClamp);
    const bool inside = p == pc;
    if (bits[j]) {
      log_lik += std::log(pc);
      grad(j, 0) = inside ? -replay_reward / pc : 0.0;
    } else {
      log_lik += std::log(1.0 - pc);
      grad(j, 0) = inside ? replay_reward / (1.0 - pc) : 0.0;
    }
  }
  if (tape != nullptr) net_.backward(cache, grad, *tape);
  return -replay_reward * log_lik;
}

double EroPolicy::mask_log_likelihood(const nn::Matrix& features, std::span<const std::uint8_t> bits) const {
  return -surrogate_loss(features, bits, 1.0);
}

double EroPolicy::policy_gradient_step(const nn::Matrix& features, std::span<const std::uint8_t> bits,
                                       double replay_reward) {
  nn::GradTape tape = net_.make_tape();
  const double loss = surrogate_loss(features, bits, replay_reward, &tape);
  nn::adam_step(net_, tape, adam_);
  ++updates_;
  return loss;
}

double EroPolicy::update_policy(replay::ReplayBuffer& buffer, double replay_reward, Rng& rng,
                                std::uint64_t current_step) {
  if (!std::isfinite(replay_reward)) {
    ++skipped_updates_;
    return 0.0;
  }
  if (buffer.empty()) return 0.0;
  double loss = 0.0;
  std::vector<std::size_t> slots;
  std::vector<std::uint8_t> bits;
  for (std::size_t step = 0; step < config_.replay_updating_steps; ++step) {
    slots.clear();
    bits.clear();
    for (std::size_t k = 0; k < config_.batch_size; ++k) {
      const std::size_t slot = rng.index(buffer.size());
      if (!buffer.has_mask_bit(slot)) continue;
      slots.push_back(slot);
      bits.push_back(buffer.in_subset(slot) ? 1 : 0);
    }
    if (slots.empty()) continue;
    loss = policy_gradient_step(feature_matrix(buffer, slots, current_step), bits, replay_reward);
  }
  return loss;
}

EpisodeEndOutcome on_episode_end(EroPolicy& policy, ReplayRewardTracker& tracker, replay::ReplayBuffer& buffer,
                                 Rng& rng, double episode_return, std::uint64_t current_step) {
  EpisodeEndOutcome out;
  out.replay_reward = tracker.push(episode_return);
  if (out.replay_reward) {
    const auto before = policy.update_count();
    policy.update_policy(buffer, *out.replay_reward, rng, current_step);
    out.policy_updated = policy.update_count() > before;
  }
  if (out.replay_reward || policy.config().subset_refresh_always) {
    policy.refresh_subset(buffer, rng, current_step);
    out.subset_refreshed = true;
  }
  out.subset_size = buffer.subset_size();
  return out;
}

}  // namespace replay_opt::ero
