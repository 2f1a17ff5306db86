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

#include "replay_opt/harness/suite.hpp"

#include <atomic>
#include <cmath>
#include <filesystem>
#include <limits>
#include <map>
#include <thread>

#include "replay_opt/harness/run.hpp"

namespace replay_opt::harness {

bool SuiteResult::all_ok() const {
  for (const auto& r : runs) {
    if (!r.ok) return false;
  }
  return true;
}

std::pair<double, std::optional<double>> mean_and_std(const std::vector<double>& values) {
  if (values.empty()) return {std::numeric_limits<double>::quiet_NaN(), std::nullopt};
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / static_cast<double>(values.size());
  if (values.size() < 2) return {mean, std::nullopt};
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / static_cast<double>(values.size() - 1))};
}

std::vector<SuiteEntry> expand_experiment(const ExperimentConfig& experiment) {
  std::vector<std::string> envs = experiment.envs;
  if (envs.empty()) envs.push_back(experiment.base.env);
  std::vector<replay::SamplerKind> samplers = experiment.samplers;
  if (samplers.empty()) samplers.push_back(experiment.base.sampler);
  std::vector<std::uint64_t> seeds = experiment.seeds;
  if (seeds.empty()) seeds.push_back(experiment.base.seed);

  std::vector<SuiteEntry> out;
  for (const auto& env : envs) {
    for (auto sampler : samplers) {
      const std::string id = env + "-" + std::string(replay::to_string(sampler));
      for (auto seed : seeds) {
        SuiteEntry e{id, experiment.base};
        e.config.env = env;
        e.config.sampler = sampler;
        e.config.seed = seed;
        e.config.out_dir =
            (std::filesystem::path(experiment.base.out_dir) / "runs" / (id + "-seed" + std::to_string(seed))).string();
        out.push_back(std::move(e));
      }
    }
  }
  return out;
}

SuiteResult run_suite(const std::vector<SuiteEntry>& entries, std::size_t parallelism, bool write_runs) {
  SuiteResult result;
  result.runs.resize(entries.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < entries.size(); i = next++) {
      SuiteRunResult& r = result.runs[i];
      r.config_id = entries[i].config_id;
      r.seed = entries[i].config.seed;
      try {
        const RunSummary s = write_runs ? run_and_write(entries[i].config) : run(entries[i].config);
        r.ok = true;
        r.final_window_mean = s.final_window_mean;
        r.wall_seconds = s.wall_seconds;
      } catch (const std::exception& e) {
        r.ok = false;
        r.error = e.what();
      }
    }
  };
  const std::size_t threads = std::max<std::size_t>(1, std::min(parallelism, entries.size()));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  std::vector<std::string> order;
  std::map<std::string, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    auto [it, inserted] = groups.try_emplace(entries[i].config_id);
    if (inserted) order.push_back(entries[i].config_id);
    it->second.push_back(i);
  }
  for (const auto& id : order) {
    const auto& members = groups[id];
    const RunConfig& first = entries[members.front()].config;
    SummaryRow row;
    row.config_id = id;
    row.sampler = std::string(replay::to_string(first.sampler));
    row.env = first.env;
    std::vector<double> finals;
    for (std::size_t i : members) {
      if (!result.runs[i].ok) continue;
      finals.push_back(result.runs[i].final_window_mean);
      row.wall_seconds += result.runs[i].wall_seconds;
    }
    row.seed_count = finals.size();
    std::tie(row.final_mean, row.final_std) = mean_and_std(finals);
    result.rows.push_back(row);
  }
  return result;
}

}  // namespace replay_opt::harness
