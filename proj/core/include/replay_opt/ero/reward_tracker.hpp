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
#include <optional>

namespace replay_opt::ero {

/// Tracks the windowed cumulative-reward estimate of the agent and turns
/// consecutive estimates into replay rewards.
class ReplayRewardTracker {
 public:
  explicit ReplayRewardTracker(std::size_t window = 100);

  /// Appends a finished episode's undiscounted return and returns
  /// current_estimate - previous_estimate, or nothing for the first episode.
  /// The current estimate then becomes the previous one.
  std::optional<double> push(double episode_return);

  /// Mean over the window (all finished episodes while fewer than `window`).
  std::optional<double> current() const { return current_; }
  std::optional<double> previous() const { return previous_; }
  std::size_t size() const { return returns_.size(); }
  std::size_t window() const { return window_; }

 private:
  std::size_t window_;
  std::deque<double> returns_;
  std::optional<double> current_;
  std::optional<double> previous_;
};

}  // namespace replay_opt::ero
