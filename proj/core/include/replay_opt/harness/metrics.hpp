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

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "replay_opt/harness/records.hpp"

namespace replay_opt::harness {

inline constexpr std::string_view kEpisodesHeader =
    "episode,global_step,return,length,rc_window,replay_reward,subset_size,subset_fallbacks";
inline constexpr std::string_view kTraceHeader = "global_step,mean_abs_td,mean_step_diff,mean_reward";
inline constexpr std::string_view kSummaryHeader =
    "config_id,sampler,env,seed_count,final_mean,final_std,wall_seconds";
inline constexpr std::string_view kEvalHeader = "after_episode,global_step,return,length";

/// Shortest decimal form that parses back to the same double.
std::string format_real(double v);

// CSV text with '\n' line endings and a header line.
std::string episodes_csv(std::span<const EpisodeRecord> records);
std::string trace_csv(std::span<const TraceRecord> records);
std::string summary_csv(std::span<const SummaryRow> rows);
std::string eval_csv(std::span<const EvalRecord> records);

// Parsers; malformed input throws std::runtime_error naming the 1-based line.
std::vector<EpisodeRecord> parse_episodes_csv(std::string_view text);
std::vector<TraceRecord> parse_trace_csv(std::string_view text);
std::vector<SummaryRow> parse_summary_csv(std::string_view text);

/// Writes `content` to `path` (IoError on failure).
void write_text_file(const std::string& path, std::string_view content);
std::string read_text_file(const std::string& path);

void write_metrics(std::span<const EpisodeRecord> records, const std::string& path);
void write_metrics(std::span<const TraceRecord> records, const std::string& path);
void write_metrics(std::span<const SummaryRow> rows, const std::string& path);

/// Trapezoidal area under the (global_step, episode return) curve.
double learning_curve_auc(std::span<const EpisodeRecord> episodes);

/// Trailing moving average with window w (w = 1 is the identity).
std::vector<double> moving_average(std::span<const double> series, std::size_t window);

}  // namespace replay_opt::harness
