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

#include "replay_opt/ero/reward_tracker.hpp"

#include "replay_opt/common/errors.hpp"

namespace replay_opt::ero {

ReplayRewardTracker::ReplayRewardTracker(std::size_t window) : window_(window) {
  if (window == 0) throw ConfigError("ReplayRewardTracker: window must be positive");
}

std::optional<double> ReplayRewardTracker::push(double episode_return) {
  returns_.push_back(episode_return);
  if (returns_.size() > window_) returns_.pop_front();
  double sum = 0.0;
  for (double r : returns_) sum += r;
  current_ = sum / static_cast<double>(returns_.size());
  std::optional<double> replay_reward;
  if (previous_) replay_reward = *current_ - *previous_;
  previous_ = current_;
  return replay_reward;
}

}  // namespace replay_opt::ero
