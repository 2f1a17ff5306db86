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
#include <span>
#include <vector>

#include "replay_opt/common/rng.hpp"

namespace replay_opt::ddpg {

struct OuConfig {
  double theta = 0.15;
  double sigma = 0.2;
  double dt = 1.0;
};

/// Ornstein-Uhlenbeck exploration noise, mean-reverting to zero:
///   x <- x + theta * (0 - x) * dt + sigma * sqrt(dt) * N(0, 1)
class OuNoise {
 public:
  OuNoise(std::size_t dim, OuConfig config = {});

  void reset();
  /// Advances one step with fresh normal draws and returns the new state.
  std::span<const double> sample(Rng& rng);
  /// Advances one step with caller-supplied standard-normal draws.
  std::span<const double> advance(std::span<const double> normal_draws);

  std::span<const double> state() const { return state_; }
  const OuConfig& config() const { return config_; }

 private:
  OuConfig config_;
  std::vector<double> state_;
  std::vector<double> draws_;
};

}  // namespace replay_opt::ddpg
