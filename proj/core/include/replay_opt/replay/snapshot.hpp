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
#include <string>
#include <vector>

#include "replay_opt/replay/buffer.hpp"

namespace replay_opt::replay {

inline constexpr char kSnapshotMagic[4] = {'E', 'R', 'P', 'B'};
inline constexpr std::uint32_t kSnapshotVersion = 1;

/// Decoded buffer dump; transitions in ring order (oldest first).
struct BufferSnapshot {
  std::uint64_t capacity = 0;
  std::uint32_t obs_dim = 0;
  std::uint32_t action_dim = 0;
  std::vector<Transition> transitions;
  std::vector<std::uint8_t> in_subset;
};

/// Binary dump, little-endian:
///   "ERPB" | version u32 | capacity u64 | size u64 | obs_dim u32 | act_dim u32
/// then per live slot, oldest first:
///   state f64[obs] | action f64[act] | reward f64 | next_state f64[obs] |
///   done u8 | insert_timestep u64 | td_error f64 | priority_score f64 |
///   per_priority f64 | in_subset u8
void write_snapshot(const ReplayBuffer& buffer, const std::string& path);
BufferSnapshot read_snapshot(const std::string& path);

}  // namespace replay_opt::replay
