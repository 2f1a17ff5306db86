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

#include "replay_opt/ddpg/ou_noise.hpp"

#include <algorithm>
#include <cmath>

#include "replay_opt/common/errors.hpp"

namespace replay_opt::ddpg {

OuNoise::OuNoise(std::size_t dim, OuConfig config) : config_(config), state_(dim, 0.0), draws_(dim, 0.0) {}

void OuNoise::reset() { std::fill(state_.begin(), state_.end(), 0.0); }

std::span<const double> OuNoise::sample(Rng& rng) {
  for (double& d : draws_) d = rng.normal();
  return advance(draws_);
}

std::span<const double> OuNoise::advance(std::span<const double> normal_draws) {
  if (normal_draws.size() != state_.size()) throw ContractViolation("OuNoise::advance: draw count mismatch");
  const double diffusion = config_.sigma * std::sqrt(config_.dt);
  for (std::size_t i = 0; i < state_.size(); ++i) {
    state_[i] += config_.theta * (0.0 - state_[i]) * config_.dt + diffusion * normal_draws[i];
  }
  return state_;
}

}  // namespace replay_opt::ddpg
