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

/// Damped 1-D point mass pushed toward a fixed goal. Terminates when the
/// point is within kGoalTolerance of the goal, truncates after 200 steps.
class PointReacher final : public Environment {
 public:
  static constexpr double kGoal = 0.8;
  static constexpr double kGoalTolerance = 0.02;
  static constexpr double kDt = 0.05;
  static constexpr double kDamping = 0.05;
  static constexpr double kMaxForce = 1.0;
  static constexpr double kMaxSpeed = 2.0;
  static constexpr std::size_t kMaxEpisodeSteps = 200;

  EnvSpec spec() const override;
  std::string_view name() const override { return "point_reacher"; }
  std::vector<double> reset(std::uint64_t seed) override;
  StepResult step(std::span<const double> action) override;
  /// [position, velocity]
  std::vector<double> observation() const override;

  void set_state(double position, double velocity);
  double position() const { return position_; }
  double velocity() const { return velocity_; }

 private:
  double position_ = 0.0;
  double velocity_ = 0.0;
  std::size_t steps_ = 0;
  bool active_ = false;
};

}  // namespace replay_opt::envs
