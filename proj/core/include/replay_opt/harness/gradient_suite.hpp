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

#include <cstdint>
#include <string>
#include <vector>

namespace replay_opt::harness {

struct GradCheckResult {
  std::string name;
  double max_relative_error = 0.0;
  int trials = 0;
  bool passed = false;
};

struct GradientSuiteOptions {
  int trials = 20;
  std::uint64_t seed = 0;
  double tolerance = 1e-4;
  /// Test hook: name of a check whose analytic gradient is deliberately
  /// corrupted (negative control).
  std::string corrupt;
};

/// Registered checks: mlp, critic-loss, actor-chain, ero-surrogate,
/// adam-step, ou-noise-determinism.
std::vector<std::string> gradient_check_names();

std::vector<GradCheckResult> run_gradient_suite(const GradientSuiteOptions& options = {});

}  // namespace replay_opt::harness
