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
#include <string>
#include <string_view>
#include <vector>

#include "replay_opt/ddpg/agent.hpp"
#include "replay_opt/ddpg/ou_noise.hpp"
#include "replay_opt/ero/policy.hpp"
#include "replay_opt/replay/sampler.hpp"

namespace replay_opt::harness {

/// Everything one training run depends on. (config, seed) fully determines
/// the run's outputs.
struct RunConfig {
  std::string env = "pendulum";
  replay::SamplerKind sampler = replay::SamplerKind::kUniform;
  std::uint64_t total_timesteps = 100'000;
  std::uint64_t rollout_steps = 100;
  std::uint64_t train_steps_per_iter = 50;
  std::uint64_t batch_size = 64;
  std::uint64_t buffer_capacity = 100'000;
  /// No training until the buffer holds this many transitions.
  std::uint64_t warmup = 1000;
  std::uint64_t seed = 0;
  /// Training steps between trace records.
  std::uint64_t trace_interval = 1000;
  /// Noise-free evaluation episode after every n-th training episode; 0 = off.
  std::uint64_t eval_every = 0;
  /// Keep the replay mask strict between refreshes (new transitions wait
  /// for the next refresh).
  bool subset_strict = false;
  /// Dump the replay buffer to `buffer.erpb` at the end of the run.
  bool snapshot = false;
  std::string out_dir = ".";

  ddpg::DdpgConfig ddpg;
  ddpg::OuConfig ou;
  replay::PerConfig per;
  ero::EroConfig ero;

  /// Throws ConfigError on inconsistent values.
  void validate() const;
};

/// A run config plus the cross-product axes used by `compare`.
struct ExperimentConfig {
  RunConfig base;
  std::vector<replay::SamplerKind> samplers;
  std::vector<std::uint64_t> seeds;
  std::vector<std::string> envs;
};

/// Sets one dotted key from its text form. Unknown keys and values that do
/// not parse as the key's type throw ConfigError.
void apply_setting(ExperimentConfig& config, std::string_view key, std::string_view value);
void apply_setting(RunConfig& config, std::string_view key, std::string_view value);

/// Text form of one key's current value.
std::string get_setting(const ExperimentConfig& config, std::string_view key);

/// All recognized keys in dump order.
std::vector<std::string> setting_keys();

/// `key = value` lines, `#` comments and blank lines ignored. Errors name
/// the line number.
ExperimentConfig parse_config_text(std::string_view text, ExperimentConfig base = {});

/// Reads and parses a config file; a missing file is a ConfigError naming
/// the path.
ExperimentConfig load_config_file(const std::string& path, ExperimentConfig base = {});

/// Effective configuration as parseable `key = value` lines.
std::string dump_config(const ExperimentConfig& config);

/// Splits `key=value`; throws ConfigError when there is no '='.
std::pair<std::string, std::string> split_assignment(std::string_view text);

}  // namespace replay_opt::harness
