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

#include "replay_opt/harness/run.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <limits>
#include <memory>
#include <optional>

#include "replay_opt/common/errors.hpp"
#include "replay_opt/common/rng.hpp"
#include "replay_opt/ddpg/agent.hpp"
#include "replay_opt/envs/env.hpp"
#include "replay_opt/ero/policy.hpp"
#include "replay_opt/harness/metrics.hpp"
#include "replay_opt/replay/snapshot.hpp"

namespace replay_opt::harness {

namespace {

TraceRecord trace_of(const replay::ReplayBuffer& buffer, const ddpg::TrainStepResult& step,
                     std::uint64_t global_step) {
  TraceRecord t;
  t.global_step = global_step;
  const double n = static_cast<double>(step.slots.size());
  for (std::size_t k = 0; k < step.slots.size(); ++k) {
    const replay::Transition& tr = buffer.at(step.slots[k].index);
    t.mean_abs_td += std::abs(step.td_errors[k]);
    t.mean_step_diff += static_cast<double>(global_step - tr.insert_timestep);
    t.mean_reward += tr.reward;
  }
  t.mean_abs_td /= n;
  t.mean_step_diff /= n;
  t.mean_reward /= n;
  return t;
}

// The training loop state for one run.
class Runner {
 public:
  explicit Runner(const RunConfig& config)
      : config_(config),
        env_(envs::make_environment(config.env)),
        eval_env_(envs::make_environment(config.env)),
        spec_(env_->spec()),
        env_rng_(Rng::substream(config.seed, "env")),
        noise_rng_(Rng::substream(config.seed, "noise")),
        sampler_rng_(Rng::substream(config.seed, "sampler")),
        ero_rng_(Rng::substream(config.seed, "ero")),
        eval_rng_(Rng::substream(config.seed, "eval")),
        agent_(spec_, config.ddpg, substream_seed(config.seed, "agent-init")),
        noise_(spec_.action_dim, config.ou),
        buffer_(config.buffer_capacity, spec_.obs_dim, spec_.action_dim, config.subset_strict),
        sampler_(replay::make_sampler(config.sampler, config.buffer_capacity, config.per)),
        tracker_(config.ero.reward_window) {
    if (config.sampler == replay::SamplerKind::kEro) {
      policy_.emplace(config.ero, substream_seed(config.seed, "ero-init"));
    }
    const std::uint64_t iterations = (config.total_timesteps + config.rollout_steps - 1) / config.rollout_steps;
    planned_train_steps_ = std::max<std::uint64_t>(1, iterations * config.train_steps_per_iter);
  }

  RunSummary execute(const RunHooks& hooks) {
    const auto start = std::chrono::steady_clock::now();
    RunSummary out;
    begin_episode();
    while (global_step_ < config_.total_timesteps) {
      for (std::uint64_t k = 0; k < config_.rollout_steps && global_step_ < config_.total_timesteps; ++k) {
        env_step(out, hooks);
      }
      if (buffer_.size() >= std::max<std::uint64_t>(config_.warmup, 1)) {
        for (std::uint64_t k = 0; k < config_.train_steps_per_iter; ++k) train_step(out);
      }
    }
    out.total_steps = global_step_;
    out.partial_episode_steps = episode_length_;
    out.train_steps = train_steps_;
    out.final_window_mean = tracker_.current().value_or(std::numeric_limits<double>::quiet_NaN());
    out.subset_fallbacks = buffer_.fallback_count();
    out.stale_priority_updates = buffer_.stale_update_count();
    out.policy_updates = policy_ ? policy_->update_count() : 0;
    out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
  }

  const replay::ReplayBuffer& buffer() const { return buffer_; }

 private:
  void begin_episode() {
    obs_ = env_->reset(env_rng_.next_u64());
    noise_.reset();
    episode_return_ = 0.0;
    episode_length_ = 0;
  }

  void env_step(RunSummary& out, const RunHooks& hooks) {
    std::vector<double> action = agent_.act(obs_, &noise_, &noise_rng_);
    envs::StepResult result = env_->step(action);
    ++global_step_;
    ++episode_length_;
    episode_return_ += result.reward;

    replay::Transition t;
    t.state = obs_;
    t.action = std::move(action);
    t.reward = result.reward;
    t.next_state = result.next_obs;
    t.done = result.done;
    t.insert_timestep = global_step_;
    const std::size_t slot = buffer_.store(std::move(t));
    sampler_->on_store(buffer_, slot);
    if (policy_) policy_->on_store(buffer_, slot, global_step_);
    obs_ = std::move(result.next_obs);

    if (!result.episode_over()) return;

    EpisodeRecord rec;
    rec.episode = episodes_;
    rec.global_step = global_step_;
    rec.episode_return = episode_return_;
    rec.length = episode_length_;
    if (policy_) {
      const ero::EpisodeEndOutcome outcome =
          ero::on_episode_end(*policy_, tracker_, buffer_, ero_rng_, episode_return_, global_step_);
      rec.replay_reward = outcome.replay_reward;
      rec.subset_size = outcome.subset_size;
      rec.subset_fallbacks = buffer_.fallback_count();
    } else {
      tracker_.push(episode_return_);
    }
    rec.rc_window = *tracker_.current();
    out.episodes.push_back(rec);
    if (hooks.on_episode) hooks.on_episode(rec);
    ++episodes_;
    if (config_.eval_every > 0 && episodes_ % config_.eval_every == 0) out.evals.push_back(evaluate());
    begin_episode();
  }

  EvalRecord evaluate() {
    EvalRecord rec;
    rec.after_episode = episodes_;
    rec.global_step = global_step_;
    std::vector<double> obs = eval_env_->reset(eval_rng_.next_u64());
    while (true) {
      const envs::StepResult r = eval_env_->step(agent_.act(obs));
      rec.episode_return += r.reward;
      ++rec.length;
      if (r.episode_over()) break;
      obs = r.next_obs;
    }
    return rec;
  }

  void train_step(RunSummary& out) {
    sampler_->set_beta(replay::annealed_beta(config_.per, static_cast<double>(train_steps_) /
                                                              static_cast<double>(planned_train_steps_)));
    ddpg::TrainStepResult step;
    try {
      step = agent_.train_step(*sampler_, buffer_, config_.batch_size, sampler_rng_);
    } catch (const NumericFault& e) {
      throw NumericFault(e.what(), static_cast<std::int64_t>(global_step_));
    }
    ++train_steps_;
    if (train_steps_ % config_.trace_interval == 0) out.traces.push_back(trace_of(buffer_, step, global_step_));
    if (policy_) policy_->set_current_step(global_step_);
    replay::update_priorities(buffer_, *sampler_, step.slots, step.td_errors, config_.per,
                              policy_ ? &*policy_ : nullptr);
  }

  const RunConfig& config_;
  std::unique_ptr<envs::Environment> env_;
  std::unique_ptr<envs::Environment> eval_env_;
  envs::EnvSpec spec_;
  Rng env_rng_;
  Rng noise_rng_;
  Rng sampler_rng_;
  Rng ero_rng_;
  Rng eval_rng_;
  ddpg::DdpgAgent agent_;
  ddpg::OuNoise noise_;
  replay::ReplayBuffer buffer_;
  std::unique_ptr<replay::Sampler> sampler_;
  std::optional<ero::EroPolicy> policy_;
  ero::ReplayRewardTracker tracker_;

  std::vector<double> obs_;
  double episode_return_ = 0.0;
  std::uint64_t episode_length_ = 0;
  std::uint64_t global_step_ = 0;
  std::uint64_t episodes_ = 0;
  std::uint64_t train_steps_ = 0;
  std::uint64_t planned_train_steps_ = 1;
};

RunSummary run_impl(const RunConfig& config, const RunHooks& hooks, bool write) {
  config.validate();
  Runner runner(config);
  RunSummary summary = runner.execute(hooks);
  if (write) {
    std::filesystem::create_directories(config.out_dir);
    const std::filesystem::path dir(config.out_dir);
    write_metrics(std::span<const EpisodeRecord>(summary.episodes), (dir / "episodes.csv").string());
    write_metrics(std::span<const TraceRecord>(summary.traces), (dir / "trace.csv").string());
    if (config.eval_every > 0) write_text_file((dir / "eval.csv").string(), eval_csv(summary.evals));
    if (config.snapshot) replay::write_snapshot(runner.buffer(), (dir / "buffer.erpb").string());
  }
  return summary;
}

}  // namespace

RunSummary run(const RunConfig& config, const RunHooks& hooks) { return run_impl(config, hooks, false); }

RunSummary run_and_write(const RunConfig& config, const RunHooks& hooks) { return run_impl(config, hooks, true); }

}  // namespace replay_opt::harness
