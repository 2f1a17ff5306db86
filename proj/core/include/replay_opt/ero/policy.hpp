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
#include <vector>

#include "replay_opt/common/rng.hpp"
#include "replay_opt/ero/features.hpp"
#include "replay_opt/ero/reward_tracker.hpp"
#include "replay_opt/nn/adam.hpp"
#include "replay_opt/nn/mlp.hpp"
#include "replay_opt/replay/buffer.hpp"
#include "replay_opt/replay/sampler.hpp"

namespace replay_opt::ero {

struct EroConfig {
  std::vector<std::size_t> hidden{64, 64};
  double learning_rate = 1e-4;
  /// Policy-gradient steps per episode end.
  std::size_t replay_updating_steps = 1;
  std::size_t batch_size = 64;
  /// Episodes in the cumulative-reward window.
  std::size_t reward_window = 100;
  /// Refresh the subset even on episodes without a replay reward.
  bool subset_refresh_always = false;
  /// Refresh draws from the lazily cached scores instead of re-scoring
  /// every live slot.
  bool lazy_refresh = false;
};

/// Clamp range of the log arguments in the surrogate.
inline constexpr double kLogClamp = 1e-8;

/// Learned replay policy: scores transitions with a sigmoid-headed MLP,
/// samples the Bernoulli replay mask and learns from replay rewards with
/// REINFORCE.
class EroPolicy final : public replay::PriorityScorer {
 public:
  EroPolicy(EroConfig config, std::uint64_t init_seed);

  const EroConfig& config() const { return config_; }
  nn::Mlp& net() { return net_; }
  const nn::Mlp& net() const { return net_; }
  const nn::AdamState& optimizer() const { return adam_; }
  FeatureNormalizer& normalizer() { return normalizer_; }
  const FeatureNormalizer& normalizer() const { return normalizer_; }

  /// Global step used when features are read inside rescore().
  void set_current_step(std::uint64_t step) { current_step_ = step; }
  std::uint64_t current_step() const { return current_step_; }

  /// Normalized feature vector of one transition.
  FeatureVector features(const replay::Transition& t, std::uint64_t current_step) const;

  /// lambda for one normalized feature vector, strictly in (0, 1).
  double score(const FeatureVector& normalized) const;
  /// lambda for each row of a (rows x 3) normalized feature matrix.
  std::vector<double> score(const nn::Matrix& normalized) const;

  /// Feeds the new transition's raw features to the normalizer and sets its
  /// priority_score by one forward pass.
  void on_store(replay::ReplayBuffer& buffer, std::size_t slot, std::uint64_t current_step);

  /// Lazy score update for replayed slots (uses current_step()).
  void rescore(replay::ReplayBuffer& buffer, std::span<const std::size_t> slots) override;

  /// Draws I_i ~ Bernoulli(lambda_i) independently for every live slot and
  /// installs the mask. Unless lazy_refresh is set, every lambda_i is
  /// recomputed first. Returns the subset size (0 for an empty buffer).
  std::size_t refresh_subset(replay::ReplayBuffer& buffer, Rng& rng, std::uint64_t current_step);

  /// Negated, replay-reward-scaled log-likelihood of the mask bits:
  ///   loss = -r * sum_j [I_j log phi_j + (1 - I_j) log(1 - phi_j)]
  /// with log arguments clamped to [kLogClamp, 1 - kLogClamp]. When `tape`
  /// is given, d loss / d theta is accumulated into it.
  double surrogate_loss(const nn::Matrix& features, std::span<const std::uint8_t> bits,
                        double replay_reward, nn::GradTape* tape = nullptr) const;

  /// sum_j [I_j log phi_j + (1 - I_j) log(1 - phi_j)] (clamped).
  double mask_log_likelihood(const nn::Matrix& features, std::span<const std::uint8_t> bits) const;

  /// One Adam step on the surrogate for a fixed mini-batch. Returns the
  /// loss before the step.
  double policy_gradient_step(const nn::Matrix& features, std::span<const std::uint8_t> bits,
                              double replay_reward);

  /// replay_updating_steps iterations of: draw batch_size slots uniformly
  /// from the whole buffer, keep those with a realized mask bit, take one
  /// policy-gradient step. A non-finite reward skips the update. Returns
  /// the last surrogate loss (0 when nothing was updated).
  double update_policy(replay::ReplayBuffer& buffer, double replay_reward, Rng& rng,
                       std::uint64_t current_step);

  std::uint64_t update_count() const { return updates_; }
  std::uint64_t skipped_update_count() const { return skipped_updates_; }

 private:
  nn::Matrix feature_matrix(const replay::ReplayBuffer& buffer, std::span<const std::size_t> slots,
                            std::uint64_t current_step) const;

  EroConfig config_;
  nn::Mlp net_;
  nn::AdamState adam_;
  FeatureNormalizer normalizer_;
  std::uint64_t current_step_ = 0;
  std::uint64_t updates_ = 0;
  std::uint64_t skipped_updates_ = 0;
};

/// What happened at one episode end.
struct EpisodeEndOutcome {
  std::optional<double> replay_reward;
  bool policy_updated = false;
  bool subset_refreshed = false;
  std::size_t subset_size = 0;
};

/// Episode-end hook: computes the replay reward; when present, runs the
/// policy update followed by a subset refresh. Without a reward the subset
/// is refreshed only under subset_refresh_always.
EpisodeEndOutcome on_episode_end(EroPolicy& policy, ReplayRewardTracker& tracker,
                                 replay::ReplayBuffer& buffer, Rng& rng, double episode_return,
                                 std::uint64_t current_step);

}  // namespace replay_opt::ero
