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

#include "replay_opt/replay/transition.hpp"

namespace replay_opt::testing {

/// Minimal 1-D transition carrying `reward`, stored at `step`.
inline replay::Transition transition(double reward = 0.0, std::uint64_t step = 0) {
  replay::Transition t;
  t.state = {reward};
  t.action = {0.0};
  t.reward = reward;
  t.next_state = {reward};
  t.insert_timestep = step;
  return t;
}

}  // namespace replay_opt::testing
