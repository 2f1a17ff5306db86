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

#include "replay_opt/envs/env.hpp"

namespace replay_opt::envs {

/// Torque-limited pendulum swing-up. theta = 0 is upright. Semi-implicit
/// Euler integration; episodes end only by truncation.
class Pendulum final : public Environment {
 public:
  static constexpr double kGravity = 10.0;
  static constexpr double kMass = 1.0;
  static constexpr double kLength = 1.0;
  static constexpr double kDt = 0.05;
  static constexpr double kMaxTorque = 2.0;
  static constexpr double kMaxSpeed = 8.0;
  static constexpr std::size_t kMaxEpisodeSteps = 200;

  EnvSpec spec() const override;
  std::string_view name() const override { return "pendulum"; }
  std::vector<double> reset(std::uint64_t seed) override;
  StepResult step(std::span<const double> action) override;
  /// [cos theta, sin theta, theta_dot]
  std::vector<double> observation() const override;

  /// Places the pendulum at an explicit state and starts a fresh episode.
  void set_state(double theta, double theta_dot);
  double theta() const { return theta_; }
  double theta_dot() const { return theta_dot_; }

 private:
  double theta_ = 0.0;
  double theta_dot_ = 0.0;
  std::size_t steps_ = 0;
  bool active_ = false;
};

/// Maps an angle into (-pi, pi].
double wrap_angle(double theta);

}  // namespace replay_opt::envs
