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
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace replay_opt::envs {

struct EnvSpec {
  std::size_t obs_dim = 0;
  std::size_t action_dim = 0;
  std::vector<double> action_low;
  std::vector<double> action_high;
  std::size_t max_episode_steps = 0;
};

struct StepResult {
  std::vector<double> next_obs;
  double reward = 0.0;
  /// Genuine terminal state; the critic does not bootstrap through it.
  bool done = false;
  /// Cut by the time limit; the critic still bootstraps.
  bool truncated = false;

  bool episode_over() const { return done || truncated; }
};

/// Episodic continuous-control task: reset() -> step()* until
/// done or truncated. Single owner, not thread-safe.
class Environment {
 public:
  virtual ~Environment() = default;

  virtual EnvSpec spec() const = 0;
  virtual std::string_view name() const = 0;

  /// Starts a new episode from an initial state drawn deterministically from
  /// `seed`.
  virtual std::vector<double> reset(std::uint64_t seed) = 0;

  /// Advances one step. The action is clamped into the bounds first.
  /// Throws ContractViolation if the episode is already over or reset() was
  /// never called.
  virtual StepResult step(std::span<const double> action) = 0;

  virtual std::vector<double> observation() const = 0;
};

/// Builds "pendulum" or "point_reacher"; throws ConfigError otherwise.
std::unique_ptr<Environment> make_environment(std::string_view name);

/// Names accepted by make_environment.
std::vector<std::string> environment_names();

}  // namespace replay_opt::envs
