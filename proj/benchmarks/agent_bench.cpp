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

#include <benchmark/benchmark.h>

#include "replay_opt/common/rng.hpp"
#include "replay_opt/ddpg/agent.hpp"
#include "replay_opt/envs/env.hpp"
#include "replay_opt/ero/policy.hpp"
#include "replay_opt/replay/buffer.hpp"
#include "replay_opt/replay/sampler.hpp"

namespace ro = replay_opt;

namespace {

ro::replay::ReplayBuffer pendulum_buffer(std::size_t n, ro::replay::Sampler& sampler, ro::ero::EroPolicy* policy) {
  auto env = ro::envs::make_environment("pendulum");
  ro::Rng rng(5);
  ro::replay::ReplayBuffer buffer(n, 3, 1);
  auto obs = env->reset(rng.next_u64());
  for (std::size_t i = 0; i < n; ++i) {
    const std::vector<double> action = {rng.uniform(-2.0, 2.0)};
    const auto step = env->step(action);
    ro::replay::Transition t;
    t.state = obs;
    t.action = action;
    t.reward = step.reward;
    t.next_state = step.next_obs;
    t.insert_timestep = i;
    const std::size_t slot = buffer.store(std::move(t));
    sampler.on_store(buffer, slot);
    if (policy != nullptr) policy->on_store(buffer, slot, i);
    obs = step.episode_over() ? env->reset(rng.next_u64()) : step.next_obs;
  }
  return buffer;
}

void BM_DdpgTrainStep(benchmark::State& state) {
  const auto kind = static_cast<ro::replay::SamplerKind>(state.range(0));
  auto env = ro::envs::make_environment("pendulum");
  auto sampler = ro::replay::make_sampler(kind, 100'000, ro::replay::PerConfig{});
  auto buffer = pendulum_buffer(100'000, *sampler, nullptr);
  ro::ddpg::DdpgAgent agent(env->spec(), ro::ddpg::DdpgConfig{}, 1);
  ro::Rng rng(6);
  for (auto _ : state) benchmark::DoNotOptimize(agent.train_step(*sampler, buffer, 64, rng));
  state.SetLabel(std::string(ro::replay::to_string(kind)));
}
BENCHMARK(BM_DdpgTrainStep)
    ->Arg(static_cast<int>(ro::replay::SamplerKind::kUniform))
    ->Arg(static_cast<int>(ro::replay::SamplerKind::kPerProp))
    ->Arg(static_cast<int>(ro::replay::SamplerKind::kPerRank))
    ->Arg(static_cast<int>(ro::replay::SamplerKind::kEro))
    ->Unit(benchmark::kMicrosecond);

void BM_EroRefreshSubset(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  ro::ero::EroConfig config;
  config.lazy_refresh = state.range(1) != 0;
  ro::ero::EroPolicy policy(config, 1);
  ro::replay::SubsetSampler sampler;
  auto buffer = pendulum_buffer(n, sampler, &policy);
  ro::Rng rng(7);
  for (auto _ : state) benchmark::DoNotOptimize(policy.refresh_subset(buffer, rng, n));
  state.SetLabel(config.lazy_refresh ? "lazy" : "full");
}
BENCHMARK(BM_EroRefreshSubset)->Args({100'000, 0})->Args({100'000, 1})->Unit(benchmark::kMillisecond);

void BM_EroPolicyUpdate(benchmark::State& state) {
  ro::ero::EroPolicy policy(ro::ero::EroConfig{}, 1);
  ro::replay::SubsetSampler sampler;
  auto buffer = pendulum_buffer(100'000, sampler, &policy);
  ro::Rng rng(8);
  policy.refresh_subset(buffer, rng, 100'000);
  for (auto _ : state) benchmark::DoNotOptimize(policy.update_policy(buffer, 1.0, rng, 100'000));
}
BENCHMARK(BM_EroPolicyUpdate)->Unit(benchmark::kMicrosecond);

}  // namespace
