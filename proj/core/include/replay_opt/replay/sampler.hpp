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
#include <deque>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "replay_opt/common/rng.hpp"
#include "replay_opt/replay/buffer.hpp"
#include "replay_opt/replay/segment_tree.hpp"

namespace replay_opt::replay {

enum class SamplerKind { kUniform, kPerProp, kPerRank, kEro };

std::string_view to_string(SamplerKind kind);
/// Throws ConfigError on unknown names.
SamplerKind parse_sampler_kind(std::string_view name);

/// Prioritized-replay hyperparameters.
struct PerConfig {
  double alpha = 0.6;
  /// Importance-sampling exponent at the start of training; annealed
  /// linearly to 1.
  double beta0 = 0.4;
  double epsilon = 1e-2;
  std::size_t rank_refresh_interval = 1000;
};

/// beta0 + (1 - beta0) * clamp(progress, 0, 1).
double annealed_beta(const PerConfig& config, double progress);

struct SampledBatch {
  std::vector<SlotRef> slots;
  /// Max-normalized importance weights; empty for unweighted samplers.
  std::vector<double> is_weights;
};

/// Strategy for drawing training batches from a ReplayBuffer. The buffer is
/// the single source of truth for transitions; samplers keep only their own
/// index structures, fed through the hooks below.
class Sampler {
 public:
  virtual ~Sampler() = default;

  virtual SamplerKind kind() const = 0;

  /// Called after every ReplayBuffer::store.
  virtual void on_store(const ReplayBuffer& /*buffer*/, std::size_t /*slot*/) {}

  /// Called after td_error / per_priority of `slots` changed.
  virtual void on_priorities_updated(const ReplayBuffer& /*buffer*/, std::span<const std::size_t> /*slots*/) {}

  /// Importance-sampling exponent for weighted samplers.
  virtual void set_beta(double /*beta*/) {}

  virtual SampledBatch sample(ReplayBuffer& buffer, std::size_t batch_size, Rng& rng) = 0;
};

class UniformSampler final : public Sampler {
 public:
  SamplerKind kind() const override { return SamplerKind::kUniform; }
  SampledBatch sample(ReplayBuffer& buffer, std::size_t batch_size, Rng& rng) override;
};

/// Uniform over the replay-policy subset (whole-buffer fallback when empty).
class SubsetSampler final : public Sampler {
 public:
  SamplerKind kind() const override { return SamplerKind::kEro; }
  SampledBatch sample(ReplayBuffer& buffer, std::size_t batch_size, Rng& rng) override;
};

/// Proportional prioritization: P(i) = p_i^alpha / sum_j p_j^alpha, drawn by
/// stratified inverse-CDF descent of a sum tree (one draw per equal-mass
/// segment).
class ProportionalSampler final : public Sampler {
 public:
  ProportionalSampler(std::size_t capacity, PerConfig config);

  SamplerKind kind() const override { return SamplerKind::kPerProp; }
  void on_store(const ReplayBuffer& buffer, std::size_t slot) override;
  void on_priorities_updated(const ReplayBuffer& buffer, std::span<const std::size_t> slots) override;
  void set_beta(double beta) override { beta_ = beta; }
  double beta() const { return beta_; }
  SampledBatch sample(ReplayBuffer& buffer, std::size_t batch_size, Rng& rng) override;

  const SumTree& tree() const { return sum_; }
  /// Probability of drawing `slot` under the current leaf masses.
  double probability(std::size_t slot) const;

 private:
  void set_leaf(std::size_t slot, double per_priority);

  PerConfig config_;
  double beta_;
  SumTree sum_;
  MinTree min_;
};

/// Rank-based prioritization: slots ordered by |td_error| descending (older
/// first on ties), P(rank k) proportional to k^-alpha. The order is rebuilt
/// by a full sort every `rank_refresh_interval` stores; between rebuilds new
/// slots enter at the top (they carry the max |td| by construction) and an
/// overwritten slot keeps the rank of the transition it replaced.
class RankSampler final : public Sampler {
 public:
  explicit RankSampler(PerConfig config);

  SamplerKind kind() const override { return SamplerKind::kPerRank; }
  void on_store(const ReplayBuffer& buffer, std::size_t slot) override;
  void set_beta(double beta) override { beta_ = beta; }
  SampledBatch sample(ReplayBuffer& buffer, std::size_t batch_size, Rng& rng) override;

  /// Full re-sort of the live slots.
  void resort(const ReplayBuffer& buffer);
  /// Slot indices by rank (index 0 is rank 1).
  const std::deque<std::size_t>& ranked_slots() const { return order_; }
  /// Probability of rank `rank` (1-based) among n ranked slots.
  double rank_probability(std::size_t rank, std::size_t n) const;

 private:
  void ensure_distribution(std::size_t n, std::size_t batch_size);

  PerConfig config_;
  double beta_;
  std::deque<std::size_t> order_;
  std::size_t stores_since_sort_ = 0;
  bool sorted_once_ = false;

  // Cached cumulative distribution over ranks for n_ slots, plus the rank
  // range covering each of the equal-mass strata.
  std::size_t cdf_n_ = 0;
  std::size_t strata_ = 0;
  std::vector<double> cdf_;
  std::vector<std::size_t> stratum_begin_;
};

std::unique_ptr<Sampler> make_sampler(SamplerKind kind, std::size_t capacity, const PerConfig& config);

/// Receives replayed slots after their TD errors changed, to refresh any
/// derived per-slot score (the learned replay policy's lambda).
class PriorityScorer {
 public:
  virtual ~PriorityScorer() = default;
  virtual void rescore(ReplayBuffer& buffer, std::span<const std::size_t> slots) = 0;
};

/// Writes new TD errors for replayed slots: caches td_error, sets
/// per_priority = |delta| + epsilon, notifies the sampler and (when given)
/// the scorer. Slots overwritten since they were sampled are skipped and
/// counted. Returns the number of skipped refs.
std::size_t update_priorities(ReplayBuffer& buffer, Sampler& sampler, std::span<const SlotRef> refs,
                              std::span<const double> td_errors, const PerConfig& config,
                              PriorityScorer* scorer = nullptr);

}  // namespace replay_opt::replay
