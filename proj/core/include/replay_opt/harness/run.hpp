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
#include <functional>
#include <vector>

#include "replay_opt/harness/config.hpp"
#include "replay_opt/harness/records.hpp"

namespace replay_opt::harness {

struct RunSummary {
  /// Windowed mean return at the end of the run; NaN without episodes.
  double final_window_mean = 0.0;
  std::vector<EpisodeRecord> episodes;
  std::vector<TraceRecord> traces;
  std::vector<EvalRecord> evals;
  std::uint64_t total_steps = 0;
  /// Steps of the unfinished episode at the end of the run.
  std::uint64_t partial_episode_steps = 0;
  std::uint64_t train_steps = 0;
  std::uint64_t subset_fallbacks = 0;
  std::uint64_t stale_priority_updates = 0;
  std::uint64_t policy_updates = 0;
  double wall_seconds = 0.0;
};

/// Optional observers, e.g. for progress output.
struct RunHooks {
  std::function<void(const EpisodeRecord&)> on_episode;
};

/// Interleaves rollouts and training until total_timesteps environment
/// steps are consumed: each iteration takes rollout_steps environment steps
/// (storing every transition and handling episode ends), then
/// train_steps_per_iter training steps once the buffer holds `warmup`
/// transitions. All randomness comes from named substreams of config.seed.
/// Throws ConfigError before doing any work and NumericFault (carrying the
/// step) on divergence.
RunSummary run(const RunConfig& config, const RunHooks& hooks = {});

/// Runs and writes episodes.csv, trace.csv (and eval.csv when evaluation is
/// on, buffer.erpb when snapshotting) into config.out_dir.
RunSummary run_and_write(const RunConfig& config, const RunHooks& hooks = {});

}  // namespace replay_opt::harness
