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

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <limits>

#include "replay_opt/common/errors.hpp"
#include "replay_opt/harness/config.hpp"
#include "replay_opt/harness/gradient_suite.hpp"
#include "replay_opt/harness/metrics.hpp"
#include "replay_opt/harness/run.hpp"
#include "replay_opt/harness/suite.hpp"
#include "support/temp_dir.hpp"

namespace replay_opt::harness {
namespace {

RunConfig small_run(replay::SamplerKind sampler = replay::SamplerKind::kUniform, std::uint64_t steps = 1200) {
  RunConfig c;
  c.sampler = sampler;
  c.total_timesteps = steps;
  c.warmup = 300;
  c.train_steps_per_iter = 10;
  c.trace_interval = 20;
  c.buffer_capacity = 1000;
  c.ddpg.hidden = {16, 16};
  c.ero.hidden = {16, 16};
  return c;
}

std::size_t line_count(const std::string& text) { return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')); }

// ---- config -------------------------------------------------------------

TEST(Config, ParsesKeyValueLines) {
  const auto c = parse_config_text(
      "# comment\n"
      "sampler = ero   # trailing\n"
      "\n"
      "total_timesteps=5000\n"
      "ddpg.hidden = 32, 32\n"
      "ero.subset_strict = true\n"
      "per.alpha = 0.7\n");
  EXPECT_EQ(c.base.sampler, replay::SamplerKind::kEro);
  EXPECT_EQ(c.base.total_timesteps, 5000u);
  EXPECT_EQ(c.base.ddpg.hidden, (std::vector<std::size_t>{32, 32}));
  EXPECT_TRUE(c.base.subset_strict);
  EXPECT_EQ(c.base.per.alpha, 0.7);
}

TEST(Config, ErrorsNameTheLine) {
  try {
    parse_config_text("seed = 1\n\nbogus.key = 3\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
    EXPECT_NE(std::string(e.what()).find("bogus.key"), std::string::npos);
  }
}

TEST(Config, TypeChecksValues) {
  RunConfig c;
  EXPECT_THROW(apply_setting(c, "total_timesteps", "-3"), ConfigError);
  EXPECT_THROW(apply_setting(c, "total_timesteps", "12x"), ConfigError);
  EXPECT_THROW(apply_setting(c, "ddpg.tau", "fast"), ConfigError);
  EXPECT_THROW(apply_setting(c, "snapshot", "maybe"), ConfigError);
  EXPECT_THROW(apply_setting(c, "env", "cartpole"), ConfigError);
  EXPECT_THROW(apply_setting(c, "sampler", "greedy"), ConfigError);
  EXPECT_THROW(apply_setting(c, "compare.seeds", "1,2"), ConfigError);
  EXPECT_THROW(split_assignment("no-equals"), ConfigError);
}

TEST(Config, EveryKeyRoundTripsThroughDump) {
  ExperimentConfig c;
  c.base.seed = 17;
  c.base.ero.learning_rate = 3e-4;
  c.base.per.beta0 = 0.123456789;
  c.samplers = {replay::SamplerKind::kUniform, replay::SamplerKind::kEro};
  c.seeds = {1, 2, 3};
  c.envs = {"point_reacher"};
  const ExperimentConfig back = parse_config_text(dump_config(c));
  for (const auto& key : setting_keys()) EXPECT_EQ(get_setting(back, key), get_setting(c, key)) << key;
}

TEST(Config, OverrideShowsInDump) {
  ExperimentConfig c;
  apply_setting(c, "ero.learning_rate", "0.00025");
  EXPECT_NE(dump_config(c).find("ero.learning_rate = 0.00025"), std::string::npos);
}

TEST(Config, CompareListsAcceptBrackets) {
  const auto c = parse_config_text("compare.samplers = [uniform, per_prop, per_rank, ero]\ncompare.seeds = [0,1,2]\n");
  EXPECT_EQ(c.samplers.size(), 4u);
  EXPECT_EQ(c.seeds, (std::vector<std::uint64_t>{0, 1, 2}));
}

TEST(Config, MissingFileNamesPath) {
  try {
    load_config_file("/nonexistent/run.cfg");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("/nonexistent/run.cfg"), std::string::npos);
  }
}

TEST(Config, ValidateRejectsNonsense) {
  RunConfig c;
  c.ddpg.gamma = 1.0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = RunConfig{};
  c.batch_size = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = RunConfig{};
  c.per.beta0 = 1.5;
  EXPECT_THROW(c.validate(), ConfigError);
  EXPECT_NO_THROW(RunConfig{}.validate());
}

TEST(Config, DefaultsMatchTrainingSetup) {
  const RunConfig c;
  EXPECT_EQ(c.rollout_steps, 100u);
  EXPECT_EQ(c.train_steps_per_iter, 50u);
  EXPECT_EQ(c.batch_size, 64u);
  EXPECT_EQ(c.ddpg.tau, 0.001);
  EXPECT_EQ(c.ddpg.actor_lr, 1e-4);
  EXPECT_EQ(c.ddpg.critic_lr, 1e-3);
  EXPECT_EQ(c.ou.theta, 0.15);
  EXPECT_EQ(c.ou.sigma, 0.2);
  EXPECT_EQ(c.ero.learning_rate, 1e-4);
  EXPECT_EQ(c.ero.reward_window, 100u);
}

// ---- metrics ------------------------------------------------------------

TEST(Metrics, EmptyListWritesHeaderOnly) {
  EXPECT_EQ(episodes_csv({}), std::string(kEpisodesHeader) + "\n");
  EXPECT_EQ(trace_csv({}), std::string(kTraceHeader) + "\n");
  EXPECT_EQ(summary_csv({}), std::string(kSummaryHeader) + "\n");
}

TEST(Metrics, OneRecordTwoLines) {
  const EpisodeRecord r{0, 200, -1234.5, 200, -1234.5, std::nullopt, std::nullopt, std::nullopt};
  const std::string text = episodes_csv(std::span<const EpisodeRecord>(&r, 1));
  EXPECT_EQ(line_count(text), 2u);
  EXPECT_EQ(text.substr(text.find('\n') + 1), "0,200,-1234.5,200,-1234.5,,,\n");
}

TEST(Metrics, EpisodeRoundTripIsExact) {
  std::vector<EpisodeRecord> recs{
      {0, 200, -0.1 - 0.2, 200, 1.0 / 3.0, std::nullopt, 17, 0},
      {1, 400, -1e-300, 200, 2.0 / 7.0, 0.5, 12345, 2},
  };
  EXPECT_EQ(parse_episodes_csv(episodes_csv(recs)), recs);
}

TEST(Metrics, TraceAndSummaryRoundTrip) {
  std::vector<TraceRecord> traces{{1000, 0.1, 250.5, -3.0}, {2000, 1e-17, 0.0, 12.25}};
  EXPECT_EQ(parse_trace_csv(trace_csv(traces)), traces);
  std::vector<SummaryRow> rows{{"pendulum-ero", "ero", "pendulum", 3, -150.25, 12.5, 4.0},
                               {"pendulum-uniform", "uniform", "pendulum", 1, -170.0, std::nullopt, 1.5}};
  EXPECT_EQ(parse_summary_csv(summary_csv(rows)), rows);
}

TEST(Metrics, FileRoundTrip) {
  testing::TempDir dir;
  std::vector<TraceRecord> traces{{10, 0.5, 1.5, -2.5}};
  write_metrics(std::span<const TraceRecord>(traces), dir.file("trace.csv"));
  EXPECT_EQ(parse_trace_csv(read_text_file(dir.file("trace.csv"))), traces);
}

TEST(Metrics, MalformedCsvNamesLine) {
  const std::string text = std::string(kTraceHeader) + "\n1,2,3,4\n5,abc,7,8\n";
  try {
    parse_trace_csv(text);
    FAIL();
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
  EXPECT_THROW(parse_trace_csv("wrong,header\n"), std::runtime_error);
  EXPECT_THROW(parse_trace_csv(std::string(kTraceHeader) + "\n1,2,3\n"), std::runtime_error);
}

TEST(Metrics, IoErrorsCarryPath) {
  try {
    write_text_file("/nonexistent-dir/x.csv", "a");
    FAIL();
  } catch (const IoError& e) {
    EXPECT_NE(std::string(e.what()).find("/nonexistent-dir/x.csv"), std::string::npos);
  }
}

TEST(Metrics, FormatRealRoundTrips) {
  for (double v : {0.1, -1.0 / 3.0, 1e-300, 123456789.123456789, -0.0}) {
    EXPECT_EQ(std::stod(format_real(v)), v);
  }
  EXPECT_EQ(format_real(std::numeric_limits<double>::quiet_NaN()), "nan");
  EXPECT_EQ(format_real(std::numeric_limits<double>::infinity()), "inf");
}

TEST(Metrics, LearningCurveArea) {
  std::vector<EpisodeRecord> eps(3);
  eps[0].global_step = 0;
  eps[0].episode_return = 0;
  eps[1].global_step = 10;
  eps[1].episode_return = 2;
  eps[2].global_step = 20;
  eps[2].episode_return = 2;
  EXPECT_DOUBLE_EQ(learning_curve_auc(eps), 10.0 + 20.0);
}

TEST(Metrics, MovingAverage) {
  const std::vector<double> xs{1, 2, 3, 4};
  EXPECT_EQ(moving_average(xs, 1), xs);
  EXPECT_EQ(moving_average(xs, 2), (std::vector<double>{1, 1.5, 2.5, 3.5}));
  EXPECT_EQ(moving_average(xs, 10), (std::vector<double>{1, 1.5, 2, 2.5}));
}

// ---- run ----------------------------------------------------------------

TEST(Run, ZeroStepsIsEmpty) {
  RunConfig c = small_run();
  c.total_timesteps = 0;
  const RunSummary s = run(c);
  EXPECT_TRUE(s.episodes.empty());
  EXPECT_TRUE(s.traces.empty());
  EXPECT_EQ(s.total_steps, 0u);
  EXPECT_TRUE(std::isnan(s.final_window_mean));
}

TEST(Run, TwoHundredStepsIsOnePendulumEpisode) {
  RunConfig c = small_run();
  c.total_timesteps = 200;
  const RunSummary s = run(c);
  ASSERT_EQ(s.episodes.size(), 1u);
  EXPECT_EQ(s.episodes[0].length, 200u);
  EXPECT_EQ(s.episodes[0].global_step, 200u);
  EXPECT_EQ(s.final_window_mean, s.episodes[0].episode_return);
}

TEST(Run, StepAccountingIsExact) {
  for (auto env : {"pendulum", "point_reacher"}) {
    RunConfig c = small_run(replay::SamplerKind::kUniform, 1537);
    c.env = env;
    const RunSummary s = run(c);
    std::uint64_t total = s.partial_episode_steps;
    for (const auto& e : s.episodes) {
      total += e.length;
      EXPECT_LE(e.length, 200u);
    }
    EXPECT_EQ(total, 1537u) << env;
    EXPECT_EQ(s.total_steps, 1537u);
  }
}

TEST(Run, WindowMeanIsMeanOfRecentReturns) {
  RunConfig c = small_run(replay::SamplerKind::kUniform, 1000);
  c.ero.reward_window = 3;
  const RunSummary s = run(c);
  ASSERT_EQ(s.episodes.size(), 5u);
  const double expected = (s.episodes[2].episode_return + s.episodes[3].episode_return + s.episodes[4].episode_return) / 3;
  EXPECT_NEAR(s.episodes[4].rc_window, expected, 1e-9);
}

TEST(Run, SamplerDoesNotChangeRolloutsBeforeTraining) {
  RunConfig c = small_run(replay::SamplerKind::kUniform, 800);
  c.warmup = 1000;
  const RunSummary base = run(c);
  for (auto k : {replay::SamplerKind::kPerProp, replay::SamplerKind::kPerRank, replay::SamplerKind::kEro}) {
    c.sampler = k;
    const RunSummary other = run(c);
    ASSERT_EQ(other.episodes.size(), base.episodes.size());
    for (std::size_t i = 0; i < base.episodes.size(); ++i) {
      EXPECT_EQ(other.episodes[i].episode_return, base.episodes[i].episode_return);
    }
  }
}

TEST(Run, EroRecordsSubsetBookkeeping) {
  const RunSummary s = run(small_run(replay::SamplerKind::kEro));
  ASSERT_GE(s.episodes.size(), 3u);
  EXPECT_FALSE(s.episodes[0].replay_reward.has_value());
  EXPECT_TRUE(s.episodes[1].replay_reward.has_value());
  for (const auto& e : s.episodes) {
    EXPECT_TRUE(e.subset_size.has_value());
    EXPECT_TRUE(e.subset_fallbacks.has_value());
  }
  EXPECT_GT(s.policy_updates, 0u);
}

TEST(Run, BaselinesLeaveEroColumnsEmpty) {
  const RunSummary s = run(small_run(replay::SamplerKind::kPerProp));
  for (const auto& e : s.episodes) {
    EXPECT_FALSE(e.replay_reward.has_value());
    EXPECT_FALSE(e.subset_size.has_value());
  }
}

TEST(Run, TracesAreWellFormed) {
  const RunSummary s = run(small_run(replay::SamplerKind::kEro));
  ASSERT_FALSE(s.traces.empty());
  for (const auto& t : s.traces) {
    EXPECT_TRUE(std::isfinite(t.mean_abs_td));
    EXPECT_GE(t.mean_step_diff, 0.0);
    EXPECT_LE(t.mean_step_diff, static_cast<double>(t.global_step));
  }
}

TEST(Run, DeterministicAcrossRuns) {
  for (auto k : {replay::SamplerKind::kUniform, replay::SamplerKind::kEro}) {
    const RunSummary a = run(small_run(k));
    const RunSummary b = run(small_run(k));
    EXPECT_EQ(a.episodes, b.episodes);
    EXPECT_EQ(a.traces, b.traces);
  }
}

TEST(Run, SeedChangesOutcome) {
  RunConfig c = small_run();
  const RunSummary a = run(c);
  c.seed = 1;
  const RunSummary b = run(c);
  EXPECT_NE(a.episodes, b.episodes);
}

TEST(Run, InvalidConfigFailsBeforeWork) {
  testing::TempDir dir;
  RunConfig c = small_run();
  c.batch_size = 0;
  c.out_dir = dir.file("out");
  EXPECT_THROW(run_and_write(c), ConfigError);
  EXPECT_FALSE(std::filesystem::exists(dir.file("out")));
}

TEST(Run, DivergenceReportsStep) {
  RunConfig c = small_run();
  c.ddpg.critic_lr = 1e100;
  c.ddpg.actor_lr = 1e100;
  try {
    run(c);
    FAIL() << "expected a numeric fault";
  } catch (const NumericFault& e) {
    EXPECT_GE(e.step(), 300);
  }
}

TEST(Run, WritesRequestedFiles) {
  testing::TempDir dir;
  RunConfig c = small_run(replay::SamplerKind::kEro, 600);
  c.out_dir = dir.file("run");
  c.eval_every = 1;
  c.snapshot = true;
  const RunSummary s = run_and_write(c);
  for (auto f : {"episodes.csv", "trace.csv", "eval.csv", "buffer.erpb"}) {
    EXPECT_TRUE(std::filesystem::exists(dir.path() / "run" / f)) << f;
  }
  EXPECT_EQ(s.evals.size(), s.episodes.size());
  EXPECT_EQ(parse_episodes_csv(read_text_file(dir.file("run/episodes.csv"))), s.episodes);
}

TEST(Run, EvaluationDoesNotPerturbTraining) {
  RunConfig c = small_run(replay::SamplerKind::kUniform, 1000);
  const RunSummary plain = run(c);
  c.eval_every = 2;
  const RunSummary with_eval = run(c);
  EXPECT_EQ(plain.episodes, with_eval.episodes);
  EXPECT_EQ(with_eval.evals.size(), 2u);
}

// ---- suite --------------------------------------------------------------

TEST(Suite, MeanAndSampleStd) {
  const auto [m, s] = mean_and_std({1.0, 2.0, 3.0});
  EXPECT_EQ(m, 2.0);
  ASSERT_TRUE(s.has_value());
  EXPECT_EQ(*s, 1.0);  // sqrt(2 / (3 - 1))
  EXPECT_FALSE(mean_and_std({4.0}).second.has_value());
}

TEST(Suite, ExpandsCrossProduct) {
  ExperimentConfig e;
  e.samplers = {replay::SamplerKind::kUniform, replay::SamplerKind::kPerProp, replay::SamplerKind::kPerRank,
                replay::SamplerKind::kEro};
  e.seeds = {0, 1, 2};
  const auto entries = expand_experiment(e);
  EXPECT_EQ(entries.size(), 12u);
  EXPECT_EQ(entries.front().config_id, "pendulum-uniform");
  EXPECT_EQ(entries.back().config.seed, 2u);
  EXPECT_EQ(entries.back().config.sampler, replay::SamplerKind::kEro);
}

TEST(Suite, SingletonMatchesRun) {
  ExperimentConfig e;
  e.base = small_run(replay::SamplerKind::kUniform, 600);
  const SuiteResult r = run_suite(expand_experiment(e), 1);
  ASSERT_EQ(r.rows.size(), 1u);
  EXPECT_EQ(r.rows[0].seed_count, 1u);
  EXPECT_EQ(r.rows[0].final_mean, run(e.base).final_window_mean);
  EXPECT_FALSE(r.rows[0].final_std.has_value());
}

TEST(Suite, AggregatesSeedsAndIsDeterministic) {
  ExperimentConfig e;
  e.base = small_run(replay::SamplerKind::kUniform, 400);
  e.samplers = {replay::SamplerKind::kUniform, replay::SamplerKind::kPerRank};
  e.seeds = {0, 1, 2};
  const SuiteResult a = run_suite(expand_experiment(e), 2);
  const SuiteResult b = run_suite(expand_experiment(e), 1);
  ASSERT_EQ(a.rows.size(), 2u);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_EQ(a.rows[i].config_id, b.rows[i].config_id);
    EXPECT_EQ(a.rows[i].final_mean, b.rows[i].final_mean);
    EXPECT_EQ(a.rows[i].final_std, b.rows[i].final_std);
    EXPECT_EQ(a.rows[i].seed_count, 3u);
  }
  std::vector<double> finals;
  for (const auto& run : a.runs)
    if (run.config_id == "pendulum-uniform") finals.push_back(run.final_window_mean);
  EXPECT_EQ(a.rows[0].final_mean, mean_and_std(finals).first);
}

TEST(Suite, FailuresAreReportedAndSkipped) {
  SuiteEntry good{"good", small_run(replay::SamplerKind::kUniform, 200)};
  SuiteEntry bad{"bad", small_run(replay::SamplerKind::kUniform, 200)};
  bad.config.ddpg.tau = 5.0;
  const SuiteResult r = run_suite({good, bad}, 1);
  EXPECT_FALSE(r.all_ok());
  EXPECT_TRUE(r.runs[0].ok);
  EXPECT_FALSE(r.runs[1].ok);
  EXPECT_FALSE(r.runs[1].error.empty());
  // A config whose every run failed keeps a row with no seeds and a NaN mean.
  ASSERT_EQ(r.rows.size(), 2u);
  EXPECT_EQ(r.rows[0].config_id, "good");
  EXPECT_EQ(r.rows[0].seed_count, 1u);
  EXPECT_EQ(r.rows[1].seed_count, 0u);
  EXPECT_TRUE(std::isnan(r.rows[1].final_mean));
}

// ---- gradient suite -----------------------------------------------------

TEST(GradientSuite, AllChecksPass) {
  const auto results = run_gradient_suite();
  ASSERT_EQ(results.size(), 6u);
  for (const auto& r : results) {
    EXPECT_TRUE(r.passed) << r.name << " " << r.max_relative_error;
    EXPECT_GE(r.trials, 20);
  }
}

TEST(GradientSuite, CorruptionIsDetected) {
  for (const auto& name : gradient_check_names()) {
    GradientSuiteOptions o;
    o.trials = 2;
    o.corrupt = name;
    for (const auto& r : run_gradient_suite(o)) EXPECT_EQ(r.passed, r.name != name) << name << " / " << r.name;
  }
}

}  // namespace
}  // namespace replay_opt::harness
