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

#include <cstdint>
#include <optional>
#include <string>

namespace replay_opt::harness {

/// One finished training episode.
struct EpisodeRecord {
  std::uint64_t episode = 0;
  std::uint64_t global_step = 0;
  double episode_return = 0.0;
  std::uint64_t length = 0;
  /// Mean return over the last (up to) 100 finished episodes.
  double rc_window = 0.0;
  // Learned-replay runs only.
  std::optional<double> replay_reward;
  std::optional<std::uint64_t> subset_size;
  std::optional<std::uint64_t> subset_fallbacks;

  bool operator==(const EpisodeRecord&) const = default;
};

/// Averages over one sampled training batch.
struct TraceRecord {
  std::uint64_t global_step = 0;
  double mean_abs_td = 0.0;
  /// Mean of (current step - insertion step).
  double mean_step_diff = 0.0;
  double mean_reward = 0.0;

  bool operator==(const TraceRecord&) const = default;
};

/// One noise-free evaluation episode (never stored, never in the window).
struct EvalRecord {
  std::uint64_t after_episode = 0;
  std::uint64_t global_step = 0;
  double episode_return = 0.0;
  std::uint64_t length = 0;

  bool operator==(const EvalRecord&) const = default;
};

/// One row of a comparison table.
struct SummaryRow {
  std::string config_id;
  std::string sampler;
  std::string env;
  std::uint64_t seed_count = 0;
  double final_mean = 0.0;
  /// Sample std (n - 1); absent for a single seed.
  std::optional<double> final_std;
  double wall_seconds = 0.0;

  bool operator==(const SummaryRow&) const = default;
};

}  // namespace replay_opt::harness
