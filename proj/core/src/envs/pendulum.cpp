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

#include "replay_opt/envs/pendulum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "replay_opt/common/errors.hpp"
#include "replay_opt/common/rng.hpp"

namespace replay_opt::envs {

double wrap_angle(double theta) {
  constexpr double kPi = std::numbers::pi;
  double w = std::fmod(theta + kPi, 2.0 * kPi);
  if (w < 0.0) w += 2.0 * kPi;
  w -= kPi;
  // fmod lands on -pi for odd multiples of pi; the range is (-pi, pi].
  return w == -kPi ? kPi : w;
}

EnvSpec Pendulum::spec() const {
  return EnvSpec{3, 1, {-kMaxTorque}, {kMaxTorque}, kMaxEpisodeSteps};
}

std::vector<double> Pendulum::reset(std::uint64_t seed) {
  Rng rng(seed);
  theta_ = rng.uniform(-std::numbers::pi, std::numbers::pi);
  theta_dot_ = rng.uniform(-1.0, 1.0);
  steps_ = 0;
  active_ = true;
  return observation();
}

void Pendulum::set_state(double theta, double theta_dot) {
  theta_ = theta;
  theta_dot_ = theta_dot;
  steps_ = 0;
  active_ = true;
}

std::vector<double> Pendulum::observation() const {
  return {std::cos(theta_), std::sin(theta_), theta_dot_};
}

StepResult Pendulum::step(std::span<const double> action) {
  if (!active_) throw ContractViolation("Pendulum::step: episode over, call reset()");
  if (action.size() != 1) throw ContractViolation("Pendulum::step: action must have width 1");
  const double u = std::clamp(action[0], -kMaxTorque, kMaxTorque);
  const double angle = wrap_angle(theta_);
  const double cost = angle * angle + 0.1 * theta_dot_ * theta_dot_ + 0.001 * u * u;

  theta_dot_ += (3.0 * kGravity / (2.0 * kLength) * std::sin(theta_) +
                 3.0 / (kMass * kLength * kLength) * u) *
                kDt;
  theta_dot_ = std::clamp(theta_dot_, -kMaxSpeed, kMaxSpeed);
  theta_ += theta_dot_ * kDt;
  ++steps_;

  StepResult r;
  r.next_obs = observation();
  r.reward = -cost;
  r.done = false;
  r.truncated = steps_ >= kMaxEpisodeSteps;
  if (r.truncated) active_ = false;
  return r;
}

}  // namespace replay_opt::envs
