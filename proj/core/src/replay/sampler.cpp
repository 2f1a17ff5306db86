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

#include "replay_opt/replay/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "replay_opt/common/errors.hpp"

namespace replay_opt::replay {

std::string_view to_string(SamplerKind kind) {
  switch (kind) {
    case SamplerKind::kUniform: return "uniform";
    case SamplerKind::kPerProp: return "per_prop";
    case SamplerKind::kPerRank: return "per_rank";
    case SamplerKind::kEro: return "ero";
  }
  return "?";
}

SamplerKind parse_sampler_kind(std::string_view name) {
  if (name == "uniform") return SamplerKind::kUniform;
  if (name == "per_prop") return SamplerKind::kPerProp;
  if (name == "per_rank") return SamplerKind::kPerRank;
  if (name == "ero") return SamplerKind::kEro;
  throw ConfigError("unknown sampler '" + std::string(name) + "' (expected uniform|per_prop|per_rank|ero)");
}

double annealed_beta(const PerConfig& config, double progress) {
  const double p = std::clamp(progress, 0.0, 1.0);
  return config.beta0 + (1.0 - config.beta0) * p;
}

SampledBatch UniformSampler::sample(ReplayBuffer& buffer, std::size_t batch_size, Rng& rng) {
  return {buffer.sample_uniform(batch_size, rng), {}};
}

SampledBatch SubsetSampler::sample(ReplayBuffer& buffer, std::size_t batch_size, Rng& rng) {
  return {buffer.sample_from_subset(batch_size, rng), {}};
}

// ---------------------------------------------------------------------------
// Proportional

ProportionalSampler::ProportionalSampler(std::size_t capacity, PerConfig config)
    : config_(config),
      beta_(config.beta0),
      sum_(capacity),
      min_(capacity, std::numeric_limits<double>::infinity()) {}

void ProportionalSampler::set_leaf(std::size_t slot, double per_priority) {
  const double mass = std::pow(per_priority, config_.alpha);
  sum_.set(slot, mass);
  min_.set(slot, mass > 0.0 ? mass : std::numeric_limits<double>::infinity());
}

void ProportionalSampler::on_store(const ReplayBuffer& buffer, std::size_t slot) {
  set_leaf(slot, buffer.at(slot).per_priority);
}

void ProportionalSampler::on_priorities_updated(const ReplayBuffer& buffer,
                                                std::span<const std::size_t> slots) {
  for (std::size_t slot : slots) set_leaf(slot, buffer.at(slot).per_priority);
}

double ProportionalSampler::probability(std::size_t slot) const { return sum_.get(slot) / sum_.total(); }

SampledBatch ProportionalSampler::sample(ReplayBuffer& buffer, std::size_t batch_size, Rng& rng) {
  if (buffer.empty()) throw EmptyBufferError();
  const double total = sum_.total();
  if (!(total > 0.0)) throw DegeneratePriorityError();
  const double min_mass = min_.root();
  const double segment = total / static_cast<double>(batch_size);
  SampledBatch out;
  out.slots.reserve(batch_size);
  out.is_weights.reserve(batch_size);
  for (std::size_t k = 0; k < batch_size; ++k) {
    const double mass = (static_cast<double>(k) + rng.uniform()) * segment;
    const std::size_t slot = sum_.find(mass);
    out.slots.push_back(buffer.ref(slot));
    // (N P(i))^-beta / max_j (N P(j))^-beta == (min_mass / mass_i)^beta.
    out.is_weights.push_back(std::pow(min_mass / sum_.get(slot), beta_));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Rank-based

RankSampler::RankSampler(PerConfig config) : config_(config), beta_(config.beta0) {}

void RankSampler::on_store(const ReplayBuffer& buffer, std::size_t slot) {
  ++stores_since_sort_;
  if (order_.size() < buffer.size()) order_.push_front(slot);
}

void RankSampler::resort(const ReplayBuffer& buffer) {
  std::vector<std::size_t> order = buffer.slots_in_order();
  // Stable sort over oldest-first order breaks ties toward older transitions.
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(buffer.at(a).td_error) > std::abs(buffer.at(b).td_error);
  });
  order_.assign(order.begin(), order.end());
  stores_since_sort_ = 0;
  sorted_once_ = true;
}

double RankSampler::rank_probability(std::size_t rank, std::size_t n) const {
  double norm = 0.0;
  for (std::size_t k = 1; k <= n; ++k) norm += std::pow(static_cast<double>(k), -config_.alpha);
  return std::pow(static_cast<double>(rank), -config_.alpha) / norm;
}

void RankSampler::ensure_distribution(std::size_t n, std::size_t batch_size) {
  if (n == cdf_n_ && batch_size == strata_) return;
  cdf_.resize(n);
  double acc = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    acc += std::pow(static_cast<double>(k + 1), -config_.alpha);
    cdf_[k] = acc;
  }
  for (double& c : cdf_) c /= acc;
  cdf_.back() = 1.0;
  // stratum_begin_[s] = first rank index whose cumulative mass exceeds s / strata.
  stratum_begin_.assign(batch_size + 1, n);
  for (std::size_t s = 0; s < batch_size; ++s) {
    const double lo = static_cast<double>(s) / static_cast<double>(batch_size);
    stratum_begin_[s] = static_cast<std::size_t>(std::upper_bound(cdf_.begin(), cdf_.end(), lo) - cdf_.begin());
  }
  stratum_begin_[batch_size] = n - 1;
  cdf_n_ = n;
  strata_ = batch_size;
}

SampledBatch RankSampler::sample(ReplayBuffer& buffer, std::size_t batch_size, Rng& rng) {
  if (buffer.empty()) throw EmptyBufferError();
  if (!sorted_once_ || stores_since_sort_ >= config_.rank_refresh_interval) {
    resort(buffer);
  }
  const std::size_t n = order_.size();
  ensure_distribution(n, batch_size);
  const double tail = n == 1 ? cdf_[0] : cdf_[n - 1] - cdf_[n - 2];
  SampledBatch out;
  out.slots.reserve(batch_size);
  out.is_weights.reserve(batch_size);
  for (std::size_t s = 0; s < batch_size; ++s) {
    const double u = (static_cast<double>(s) + rng.uniform()) / static_cast<double>(batch_size);
    const auto first = cdf_.begin() + static_cast<std::ptrdiff_t>(std::min(stratum_begin_[s], n - 1));
    const auto last = cdf_.begin() + static_cast<std::ptrdiff_t>(std::min(stratum_begin_[s + 1], n - 1)) + 1;
    auto it = std::upper_bound(first, last, u);
    if (it == last) --it;
    const std::size_t rank_index = static_cast<std::size_t>(it - cdf_.begin());
    out.slots.push_back(buffer.ref(order_[rank_index]));
    const double p = rank_index == 0 ? cdf_[0] : cdf_[rank_index] - cdf_[rank_index - 1];
    out.is_weights.push_back(std::min(1.0, std::pow(tail / p, beta_)));
  }
  return out;
}

std::unique_ptr<Sampler> make_sampler(SamplerKind kind, std::size_t capacity, const PerConfig& config) {
  switch (kind) {
    case SamplerKind::kUniform: return std::make_unique<UniformSampler>();
    case SamplerKind::kPerProp: return std::make_unique<ProportionalSampler>(capacity, config);
    case SamplerKind::kPerRank: return std::make_unique<RankSampler>(config);
    case SamplerKind::kEro: return std::make_unique<SubsetSampler>();
  }
  throw ConfigError("unknown sampler kind");
}

std::size_t update_priorities(ReplayBuffer& buffer, Sampler& sampler, std::span<const SlotRef> refs,
                              std::span<const double> td_errors, const PerConfig& config,
                              PriorityScorer* scorer) {
  if (refs.size() != td_errors.size()) {
    throw ContractViolation("update_priorities: refs and td_errors differ in length");
  }
  std::size_t skipped = 0;
  std::vector<std::size_t> touched;
  touched.reserve(refs.size());
  for (std::size_t k = 0; k < refs.size(); ++k) {
    if (!buffer.is_live(refs[k])) {
      buffer.note_stale_update();
      ++skipped;
      continue;
    }
    const double td = td_errors[k];
    buffer.set_td_error(refs[k].index, td, std::abs(td) + config.epsilon);
    touched.push_back(refs[k].index);
  }
  if (touched.empty()) return skipped;
  sampler.on_priorities_updated(buffer, touched);
  if (scorer != nullptr) scorer->rescore(buffer, touched);
  return skipped;
}

}  // namespace replay_opt::replay
