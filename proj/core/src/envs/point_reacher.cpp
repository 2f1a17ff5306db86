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

#include "replay_opt/envs/point_reacher.hpp"

#include <algorithm>
#include <cmath>

#include "replay_opt/common/errors.hpp"
#include "replay_opt/common/rng.hpp"

namespace replay_opt::envs {

EnvSpec PointReacher::spec() const {
  return EnvSpec{2, 1, {-kMaxForce}, {kMaxForce}, kMaxEpisodeSteps};
}

std::vector<double> PointReacher::reset(std::uint64_t seed) {
  Rng rng(seed);
  position_ = rng.uniform(-1.0, -0.5);
  velocity_ = 0.0;
  steps_ = 0;
  active_ = true;
  return observation();
}

void PointReacher::set_state(double position, double velocity) {
  position_ = position;
  velocity_ = velocity;
  steps_ = 0;
  active_ = true;
}

std::vector<double> PointReacher::observation() const { return {position_, velocity_}; }

StepResult PointReacher::step(std::span<const double> action) {
  if (!active_) throw ContractViolation("PointReacher::step: episode over, call reset()");
  if (action.size() != 1) throw ContractViolation("PointReacher::step: action must have width 1");
  const double u = std::clamp(action[0], -kMaxForce, kMaxForce);
  velocity_ = std::clamp(velocity_ * (1.0 - kDamping) + u * kDt, -kMaxSpeed, kMaxSpeed);
  position_ = std::clamp(position_ + velocity_ * kDt, -1.0, 1.0);
  ++steps_;

  const double distance = std::abs(position_ - kGoal);
  StepResult r;
  r.next_obs = observation();
  r.reward = -distance;
  r.done = distance < kGoalTolerance;
  r.truncated = !r.done && steps_ >= kMaxEpisodeSteps;
  if (r.episode_over()) active_ = false;
  return r;
}

}  // namespace replay_opt::envs
