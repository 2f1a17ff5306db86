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
#include <vector>

namespace replay_opt::replay {

/// One stored experience plus the bookkeeping the samplers read.
struct Transition {
  std::vector<double> state;
  std::vector<double> action;
  double reward = 0.0;
  std::vector<double> next_state;
  /// Terminal state (not a time-limit truncation).
  bool done = false;
  /// Global environment step at storage time.
  std::uint64_t insert_timestep = 0;
  /// Last TD error seen for this transition; refreshed only when replayed.
  double td_error = 0.0;
  /// Replay-policy score lambda_i in (0, 1).
  double priority_score = 0.5;
  /// Proportional-replay priority |delta| + eps (before the alpha exponent).
  double per_priority = 1.0;
};

/// Slot index plus the store serial it referred to when handed out, so that
/// late updates to an overwritten slot can be detected.
struct SlotRef {
  std::size_t index = 0;
  std::uint64_t serial = 0;

  bool operator==(const SlotRef&) const = default;
};

}  // namespace replay_opt::replay
