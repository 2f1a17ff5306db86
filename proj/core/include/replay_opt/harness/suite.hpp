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
#include <optional>
#include <string>
#include <vector>

#include "replay_opt/harness/config.hpp"
#include "replay_opt/harness/records.hpp"

namespace replay_opt::harness {

struct SuiteEntry {
  /// Runs sharing an id are aggregated into one summary row.
  std::string config_id;
  RunConfig config;
};

struct SuiteRunResult {
  std::string config_id;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  double final_window_mean = 0.0;
  double wall_seconds = 0.0;
};

struct SuiteResult {
  std::vector<SuiteRunResult> runs;
  /// One row per config id, in first-appearance order.
  std::vector<SummaryRow> rows;

  bool all_ok() const;
};

/// Cross product env x sampler x seed of an experiment; ids are
/// "<env>-<sampler>", each run writes under <out_dir>/runs/<id>-seed<k>.
std::vector<SuiteEntry> expand_experiment(const ExperimentConfig& experiment);

/// Executes independent runs on up to `parallelism` threads. Failed runs
/// are reported and excluded from the aggregates; the suite continues.
/// When `write_runs` is set every run writes its own CSVs.
SuiteResult run_suite(const std::vector<SuiteEntry>& entries, std::size_t parallelism, bool write_runs = false);

/// Sample mean and (n - 1) standard deviation; std is absent for n < 2.
std::pair<double, std::optional<double>> mean_and_std(const std::vector<double>& values);

}  // namespace replay_opt::harness
