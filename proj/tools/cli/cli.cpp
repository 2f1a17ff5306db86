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

#include "cli/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <optional>

#include "replay_opt/common/errors.hpp"
#include "replay_opt/harness/config.hpp"
#include "replay_opt/harness/gradient_suite.hpp"
#include "replay_opt/harness/metrics.hpp"
#include "replay_opt/harness/run.hpp"
#include "replay_opt/harness/suite.hpp"

namespace replay_opt::cli {

namespace {

namespace fs = std::filesystem;
using harness::format_real;

/// Options shared by `run` and `compare`.
struct ConfigOptions {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_dir;
  std::optional<std::uint64_t> eval_every;
  bool print_config = false;
};

void add_config_options(CLI::App& cmd, ConfigOptions& o) {
  cmd.add_option("--config", o.config_path, "Config file (key = value lines)");
  cmd.add_option("--set", o.overrides, "Override one key, e.g. --set ero.learning_rate=3e-4")->allow_extra_args(false);
  cmd.add_option("--out", o.out_dir, "Output directory");
  cmd.add_option("--eval-every", o.eval_every, "Noise-free evaluation episode every n episodes (0 = off)");
  cmd.add_flag("--print-config", o.print_config, "Print the effective configuration and exit");
}

std::uint64_t parse_env_seed(const char* text) {
  std::uint64_t v = 0;
  const std::string_view s(text);
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || end != s.data() + s.size() || s.empty()) {
    throw ConfigError("REPLAY_OPT_SEED is not an unsigned integer: '" + std::string(s) + "'");
  }
  return v;
}

// Precedence, lowest first: REPLAY_OPT_SEED, config file, flags.
harness::ExperimentConfig resolve_config(const ConfigOptions& o) {
  harness::ExperimentConfig exp;
  if (const char* seed = std::getenv("REPLAY_OPT_SEED")) exp.base.seed = parse_env_seed(seed);
  if (!o.config_path.empty()) exp = harness::load_config_file(o.config_path, exp);
  for (const auto& text : o.overrides) {
    const auto [key, value] = harness::split_assignment(text);
    harness::apply_setting(exp, key, value);
  }
  if (!o.out_dir.empty()) exp.base.out_dir = o.out_dir;
  if (o.eval_every) exp.base.eval_every = *o.eval_every;
  exp.base.validate();
  return exp;
}

std::string config_id(const harness::RunConfig& c) {
  return c.env + "-" + std::string(replay::to_string(c.sampler));
}

int cmd_run(const ConfigOptions& o, std::ostream& out) {
  const harness::ExperimentConfig exp = resolve_config(o);
  if (o.print_config) {
    out << harness::dump_config(exp);
    return kExitOk;
  }
  const harness::RunConfig& cfg = exp.base;
  fs::create_directories(cfg.out_dir);
  const harness::RunSummary s = harness::run_and_write(cfg);
  const harness::SummaryRow row{config_id(cfg), std::string(replay::to_string(cfg.sampler)), cfg.env, 1,
                                s.final_window_mean, std::nullopt, s.wall_seconds};
  harness::write_metrics(std::span<const harness::SummaryRow>(&row, 1), (fs::path(cfg.out_dir) / "summary.csv").string());
  out << "sampler=" << replay::to_string(cfg.sampler) << " env=" << cfg.env << " steps=" << s.total_steps
      << " final=" << format_real(s.final_window_mean) << '\n';
  return kExitOk;
}

int cmd_compare(const ConfigOptions& o, std::size_t jobs, std::ostream& out, std::ostream& err) {
  const harness::ExperimentConfig exp = resolve_config(o);
  if (o.print_config) {
    out << harness::dump_config(exp);
    return kExitOk;
  }
  const auto entries = harness::expand_experiment(exp);
  for (const auto& e : entries) e.config.validate();
  fs::create_directories(exp.base.out_dir);
  const harness::SuiteResult result = harness::run_suite(entries, jobs, /*write_runs=*/true);
  harness::write_metrics(std::span<const harness::SummaryRow>(result.rows),
                         (fs::path(exp.base.out_dir) / "summary.csv").string());

  for (const auto& r : result.runs) {
    if (!r.ok) err << "run " << r.config_id << " seed=" << r.seed << " FAILED: " << r.error << '\n';
  }
  std::vector<harness::SummaryRow> rows = result.rows;
  // Best first; rows without a finite mean sink to the bottom.
  std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    const bool fa = std::isfinite(a.final_mean);
    const bool fb = std::isfinite(b.final_mean);
    if (fa != fb) return fa;
    return fa && a.final_mean > b.final_mean;
  });
  std::size_t width = 9;
  for (const auto& r : rows) width = std::max(width, r.config_id.size());
  out << std::left;
  out.width(static_cast<std::streamsize>(width + 2));
  out << "config_id" << "seeds  final_mean    final_std\n";
  for (const auto& r : rows) {
    out.width(static_cast<std::streamsize>(width + 2));
    out << r.config_id;
    out.width(7);
    out << r.seed_count;
    out.width(14);
    out << format_real(r.final_mean) << (r.final_std ? format_real(*r.final_std) : "-") << '\n';
  }
  return result.all_ok() ? kExitOk : kExitPartialFailure;
}

int cmd_trace(const std::string& input, const std::string& output, std::size_t window, std::ostream& out) {
  const std::string text = harness::read_text_file(input);
  std::vector<harness::TraceRecord> records;
  try {
    records = harness::parse_trace_csv(text);
  } catch (const std::runtime_error& e) {
    throw ConfigError(input + ": " + e.what());
  }
  if (window == 0) throw ConfigError("--window must be at least 1");

  std::vector<double> td, diff, reward;
  for (const auto& r : records) {
    td.push_back(r.mean_abs_td);
    diff.push_back(r.mean_step_diff);
    reward.push_back(r.mean_reward);
  }
  td = harness::moving_average(td, window);
  diff = harness::moving_average(diff, window);
  reward = harness::moving_average(reward, window);
  std::vector<harness::TraceRecord> smoothed = records;
  for (std::size_t i = 0; i < smoothed.size(); ++i) {
    smoothed[i].mean_abs_td = td[i];
    smoothed[i].mean_step_diff = diff[i];
    smoothed[i].mean_reward = reward[i];
  }
  const std::string path =
      output.empty() ? (fs::path(input).parent_path() / "trace_smoothed.csv").string() : output;
  harness::write_metrics(std::span<const harness::TraceRecord>(smoothed), path);

  const auto report = [&](const char* name, const std::vector<double>& series) {
    out << name;
    if (series.empty()) {
      out << " empty\n";
      return;
    }
    const auto [lo, hi] = std::minmax_element(series.begin(), series.end());
    out << " min=" << format_real(*lo) << " max=" << format_real(*hi) << " final=" << format_real(series.back())
        << '\n';
  };
  out << "rows=" << records.size() << " window=" << window << " output=" << path << '\n';
  report("mean_abs_td", td);
  report("mean_step_diff", diff);
  report("mean_reward", reward);
  return kExitOk;
}

int cmd_gradcheck(const harness::GradientSuiteOptions& options, std::ostream& out, std::ostream& err) {
  if (!options.corrupt.empty()) {
    const auto names = harness::gradient_check_names();
    if (std::find(names.begin(), names.end(), options.corrupt) == names.end()) {
      throw ConfigError("unknown gradient check '" + options.corrupt + "'");
    }
  }
  const auto results = harness::run_gradient_suite(options);
  bool ok = true;
  for (const auto& r : results) {
    out << r.name << " max_rel_err=" << format_real(r.max_relative_error) << " trials=" << r.trials << ' '
        << (r.passed ? "ok" : "FAILED") << '\n';
    if (!r.passed) {
      err << "gradient check failed: " << r.name << '\n';
      ok = false;
    }
  }
  return ok ? kExitOk : kExitGradcheckFailed;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Replay-policy experiments: training runs, sampler comparisons, traces and gradient checks",
               "replay-opt"};
  app.require_subcommand(1);

  ConfigOptions run_opts;
  CLI::App* run = app.add_subcommand("run", "Train one agent and write episode/trace/summary CSVs");
  add_config_options(*run, run_opts);

  ConfigOptions compare_opts;
  std::size_t jobs = 1;
  CLI::App* compare = app.add_subcommand("compare", "Run the env x sampler x seed grid and summarize");
  add_config_options(*compare, compare_opts);
  compare->add_option("--jobs", jobs, "Parallel runs")->check(CLI::PositiveNumber);

  std::string trace_input;
  std::string trace_output;
  std::size_t window = 1;
  CLI::App* trace = app.add_subcommand("trace", "Smooth a trace CSV and report per-feature ranges");
  trace->add_option("--input", trace_input, "trace.csv of a finished run")->required();
  trace->add_option("--output", trace_output, "Smoothed CSV (default: trace_smoothed.csv next to the input)");
  trace->add_option("--window", window, "Trailing moving-average window");

  harness::GradientSuiteOptions grad;
  CLI::App* gradcheck = app.add_subcommand("gradcheck", "Compare analytic gradients with finite differences");
  gradcheck->add_option("--trials", grad.trials, "Random trials per check")->check(CLI::PositiveNumber);
  gradcheck->add_option("--seed", grad.seed, "Seed for the random trials");
  gradcheck->add_option("--corrupt", grad.corrupt, "Perturb one check's analytic gradient (self-test)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfigError;
  }

  try {
    if (run->parsed()) return cmd_run(run_opts, out);
    if (compare->parsed()) return cmd_compare(compare_opts, jobs, out, err);
    if (trace->parsed()) return cmd_trace(trace_input, trace_output, window, out);
    return cmd_gradcheck(grad, out, err);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const IoError& e) {
    err << "io error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const NumericFault& e) {
    err << "numeric fault: " << e.what() << '\n';
    return kExitNumericFault;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitPartialFailure;
  }
}

}  // namespace replay_opt::cli
