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

#include "replay_opt/harness/metrics.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "replay_opt/common/errors.hpp"

namespace replay_opt::harness {

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

namespace {

template <typename T>
std::string optional_text(const std::optional<T>& v) {
  if (!v) return {};
  if constexpr (std::is_floating_point_v<T>) {
    return format_real(*v);
  } else {
    return std::to_string(*v);
  }
}

class CsvRows {
 public:
  CsvRows(std::string_view text, std::string_view header) : text_(text) {
    std::string_view first;
    if (!next_line(first) || first != header) {
      throw std::runtime_error("line 1: expected header '" + std::string(header) + "'");
    }
  }

  /// Next non-empty data line split on commas; false at end of input.
  bool next(std::vector<std::string_view>& fields) {
    std::string_view line;
    do {
      if (!next_line(line)) return false;
    } while (line.empty());
    fields.clear();
    while (true) {
      const auto comma = line.find(',');
      fields.push_back(line.substr(0, comma));
      if (comma == std::string_view::npos) break;
      line.remove_prefix(comma + 1);
    }
    return true;
  }

  std::size_t line() const { return line_; }

  [[noreturn]] void fail(const std::string& what) const {
    throw std::runtime_error("line " + std::to_string(line_) + ": " + what);
  }

  void expect_fields(const std::vector<std::string_view>& fields, std::size_t n) const {
    if (fields.size() != n) {
      fail("expected " + std::to_string(n) + " fields, got " + std::to_string(fields.size()));
    }
  }

  std::uint64_t u64(std::string_view f) const {
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
    if (f.empty() || ec != std::errc{} || ptr != f.data() + f.size()) fail("bad integer '" + std::string(f) + "'");
    return v;
  }

  double real(std::string_view f) const {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
    if (f.empty() || ec != std::errc{} || ptr != f.data() + f.size()) fail("bad number '" + std::string(f) + "'");
    return v;
  }

  std::optional<double> opt_real(std::string_view f) const {
    if (f.empty()) return std::nullopt;
    return real(f);
  }
  std::optional<std::uint64_t> opt_u64(std::string_view f) const {
    if (f.empty()) return std::nullopt;
    return u64(f);
  }

 private:
  bool next_line(std::string_view& line) {
    if (pos_ >= text_.size()) return false;
    const auto nl = text_.find('\n', pos_);
    line = text_.substr(pos_, nl == std::string_view::npos ? std::string_view::npos : nl - pos_);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    pos_ = nl == std::string_view::npos ? text_.size() : nl + 1;
    ++line_;
    return true;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 0;
};

}  // namespace

std::string episodes_csv(std::span<const EpisodeRecord> records) {
  std::string out(kEpisodesHeader);
  out += '\n';
  for (const auto& r : records) {
    out += std::to_string(r.episode) + ',' + std::to_string(r.global_step) + ',' + format_real(r.episode_return) +
           ',' + std::to_string(r.length) + ',' + format_real(r.rc_window) + ',' + optional_text(r.replay_reward) +
           ',' + optional_text(r.subset_size) + ',' + optional_text(r.subset_fallbacks) + '\n';
  }
  return out;
}

std::string trace_csv(std::span<const TraceRecord> records) {
  std::string out(kTraceHeader);
  out += '\n';
  for (const auto& r : records) {
    out += std::to_string(r.global_step) + ',' + format_real(r.mean_abs_td) + ',' + format_real(r.mean_step_diff) +
           ',' + format_real(r.mean_reward) + '\n';
  }
  return out;
}

std::string summary_csv(std::span<const SummaryRow> rows) {
  std::string out(kSummaryHeader);
  out += '\n';
  for (const auto& r : rows) {
    out += r.config_id + ',' + r.sampler + ',' + r.env + ',' + std::to_string(r.seed_count) + ',' +
           format_real(r.final_mean) + ',' + optional_text(r.final_std) + ',' + format_real(r.wall_seconds) + '\n';
  }
  return out;
}

std::string eval_csv(std::span<const EvalRecord> records) {
  std::string out(kEvalHeader);
  out += '\n';
  for (const auto& r : records) {
    out += std::to_string(r.after_episode) + ',' + std::to_string(r.global_step) + ',' +
           format_real(r.episode_return) + ',' + std::to_string(r.length) + '\n';
  }
  return out;
}

std::vector<EpisodeRecord> parse_episodes_csv(std::string_view text) {
  CsvRows rows(text, kEpisodesHeader);
  std::vector<EpisodeRecord> out;
  std::vector<std::string_view> f;
  while (rows.next(f)) {
    rows.expect_fields(f, 8);
    EpisodeRecord r;
    r.episode = rows.u64(f[0]);
    r.global_step = rows.u64(f[1]);
    r.episode_return = rows.real(f[2]);
    r.length = rows.u64(f[3]);
    r.rc_window = rows.real(f[4]);
    r.replay_reward = rows.opt_real(f[5]);
    r.subset_size = rows.opt_u64(f[6]);
    r.subset_fallbacks = rows.opt_u64(f[7]);
    out.push_back(r);
  }
  return out;
}

std::vector<TraceRecord> parse_trace_csv(std::string_view text) {
  CsvRows rows(text, kTraceHeader);
  std::vector<TraceRecord> out;
  std::vector<std::string_view> f;
  while (rows.next(f)) {
    rows.expect_fields(f, 4);
    out.push_back({rows.u64(f[0]), rows.real(f[1]), rows.real(f[2]), rows.real(f[3])});
  }
  return out;
}

std::vector<SummaryRow> parse_summary_csv(std::string_view text) {
  CsvRows rows(text, kSummaryHeader);
  std::vector<SummaryRow> out;
  std::vector<std::string_view> f;
  while (rows.next(f)) {
    rows.expect_fields(f, 7);
    SummaryRow r;
    r.config_id = std::string(f[0]);
    r.sampler = std::string(f[1]);
    r.env = std::string(f[2]);
    r.seed_count = rows.u64(f[3]);
    r.final_mean = rows.real(f[4]);
    r.final_std = rows.opt_real(f[5]);
    r.wall_seconds = rows.real(f[6]);
    out.push_back(r);
  }
  return out;
}

void write_text_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path, "cannot open for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw IoError(path, "write failed");
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path, "cannot open for reading");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_metrics(std::span<const EpisodeRecord> records, const std::string& path) {
  write_text_file(path, episodes_csv(records));
}
void write_metrics(std::span<const TraceRecord> records, const std::string& path) {
  write_text_file(path, trace_csv(records));
}
void write_metrics(std::span<const SummaryRow> rows, const std::string& path) {
  write_text_file(path, summary_csv(rows));
}

double learning_curve_auc(std::span<const EpisodeRecord> episodes) {
  double area = 0.0;
  for (std::size_t i = 1; i < episodes.size(); ++i) {
    const double dx = static_cast<double>(episodes[i].global_step) - static_cast<double>(episodes[i - 1].global_step);
    area += 0.5 * (episodes[i].episode_return + episodes[i - 1].episode_return) * dx;
  }
  return area;
}

std::vector<double> moving_average(std::span<const double> series, std::size_t window) {
  if (window == 0) window = 1;
  std::vector<double> out(series.size());
  for (std::size_t i = 0; i < series.size(); ++i) {
    const std::size_t lo = i + 1 >= window ? i + 1 - window : 0;
    double sum = 0.0;
    for (std::size_t k = lo; k <= i; ++k) sum += series[k];
    out[i] = sum / static_cast<double>(i + 1 - lo);
  }
  return out;
}

}  // namespace replay_opt::harness
