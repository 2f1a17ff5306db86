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

#include "replay_opt/harness/gradient_suite.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "replay_opt/common/rng.hpp"
#include "replay_opt/ddpg/agent.hpp"
#include "replay_opt/ddpg/ou_noise.hpp"
#include "replay_opt/ero/policy.hpp"
#include "replay_opt/nn/adam.hpp"
#include "replay_opt/nn/grad_check.hpp"
#include "replay_opt/nn/mlp.hpp"

namespace replay_opt::harness {

namespace {

// Probes whose relu pre-activations sit closer than this to zero are
// redrawn, so central differences never straddle a kink.
constexpr double kKinkMargin = 1e-3;
constexpr int kMaxRedraws = 200;

nn::Matrix random_matrix(std::size_t rows, std::size_t cols, Rng& rng, double scale = 1.0) {
  nn::Matrix m(rows, cols);
  for (double& v : m.data()) v = scale * rng.normal();
  return m;
}

void corrupt_if(const GradientSuiteOptions& options, const char* name, std::vector<double>& analytic) {
  if (options.corrupt == name && !analytic.empty()) analytic[0] = analytic[0] * 1.5 + 1e-3;
}

double check_mlp(const GradientSuiteOptions& options, Rng& rng) {
  const nn::Activation hidden_choices[] = {nn::Activation::kTanh, nn::Activation::kRelu, nn::Activation::kSigmoid};
  const nn::Activation head_choices[] = {nn::Activation::kLinear, nn::Activation::kTanh, nn::Activation::kSigmoid};
  double worst = 0.0;
  for (int trial = 0; trial < options.trials; ++trial) {
    for (int attempt = 0;; ++attempt) {
      std::vector<std::size_t> sizes{1 + rng.index(4)};
      std::vector<nn::Activation> acts;
      const std::size_t hidden = 1 + rng.index(2);
      for (std::size_t h = 0; h < hidden; ++h) {
        sizes.push_back(2 + rng.index(7));
        acts.push_back(hidden_choices[rng.index(3)]);
      }
      sizes.push_back(1 + rng.index(3));
      acts.push_back(head_choices[rng.index(3)]);
      nn::Mlp net(sizes, acts, rng.next_u64());
      const nn::Matrix x = random_matrix(3, sizes.front(), rng);
      if (net.min_abs_relu_preactivation(x) < kKinkMargin && attempt < kMaxRedraws) continue;

      const nn::Matrix c = random_matrix(x.rows(), sizes.back(), rng);
      const nn::Matrix d = random_matrix(x.rows(), sizes.back(), rng);
      // loss = sum c * out + 0.5 * d * out^2
      const auto value = [&](const nn::Matrix& out) {
        double s = 0.0;
        for (std::size_t k = 0; k < out.size(); ++k) {
          const double o = out.data()[k];
          s += c.data()[k] * o + 0.5 * d.data()[k] * o * o;
        }
        return s;
      };
      const auto gradient = [&](const nn::Matrix& out) {
        nn::Matrix g(out.rows(), out.cols());
        for (std::size_t k = 0; k < out.size(); ++k) g.data()[k] = c.data()[k] + d.data()[k] * out.data()[k];
        return g;
      };
      nn::ForwardCache cache;
      const nn::Matrix& out = net.forward(x, cache);
      nn::GradTape tape = net.make_tape();
      net.backward(cache, gradient(out), tape);
      corrupt_if(options, "mlp", tape.params);
      const auto numeric = nn::numeric_gradient(net.params(), [&] { return value(net.forward(x)); });
      worst = std::max(worst, nn::max_relative_error(tape.params, numeric));
      break;
    }
  }
  return worst;
}

envs::EnvSpec small_spec() { return envs::EnvSpec{3, 1, {-2.0}, {2.0}, 200}; }

ddpg::DdpgConfig small_ddpg() {
  ddpg::DdpgConfig c;
  c.hidden = {8, 8};
  c.output_init = 0.5;
  return c;
}

ddpg::Batch random_batch(std::size_t n, const envs::EnvSpec& spec, Rng& rng) {
  ddpg::Batch b;
  b.states = random_matrix(n, spec.obs_dim, rng);
  b.next_states = random_matrix(n, spec.obs_dim, rng);
  b.actions.resize(n, spec.action_dim);
  for (double& a : b.actions.data()) a = rng.uniform(-2.0, 2.0);
  for (std::size_t t = 0; t < n; ++t) {
    b.rewards.push_back(rng.normal());
    b.done.push_back(rng.bernoulli(0.3) ? 1 : 0);
  }
  return b;
}

nn::Matrix concat(const nn::Matrix& a, const nn::Matrix& b) {
  nn::Matrix x(a.rows(), a.cols() + b.cols());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    for (std::size_t i = 0; i < a.cols(); ++i) x(r, i) = a(r, i);
    for (std::size_t i = 0; i < b.cols(); ++i) x(r, a.cols() + i) = b(r, i);
  }
  return x;
}

double check_critic_loss(const GradientSuiteOptions& options, Rng& rng) {
  double worst = 0.0;
  const envs::EnvSpec spec = small_spec();
  for (int trial = 0; trial < options.trials; ++trial) {
    for (int attempt = 0;; ++attempt) {
      ddpg::DdpgAgent agent(spec, small_ddpg(), rng.next_u64());
      // Decouple the targets from the online critic.
      for (double& p : agent.target_critic().params()) p += 0.1 * rng.normal();
      const ddpg::Batch batch = random_batch(5, spec, rng);
      if (agent.critic().min_abs_relu_preactivation(concat(batch.states, batch.actions)) < kKinkMargin &&
          attempt < kMaxRedraws) {
        continue;
      }
      std::vector<double> weights;
      for (std::size_t t = 0; t < batch.size(); ++t) weights.push_back(rng.uniform(0.1, 1.0));
      const std::vector<double> y = agent.critic_targets(batch);
      nn::GradTape tape = agent.critic().make_tape();
      agent.critic_loss(batch, y, weights, &tape);
      corrupt_if(options, "critic-loss", tape.params);
      const auto numeric = nn::numeric_gradient(agent.critic().params(), [&] {
        return agent.critic_loss(batch, y, weights);
      });
      worst = std::max(worst, nn::max_relative_error(tape.params, numeric));
      break;
    }
  }
  return worst;
}

double check_actor_chain(const GradientSuiteOptions& options, Rng& rng) {
  double worst = 0.0;
  const envs::EnvSpec spec = small_spec();
  for (int trial = 0; trial < options.trials; ++trial) {
    for (int attempt = 0;; ++attempt) {
      ddpg::DdpgAgent agent(spec, small_ddpg(), rng.next_u64());
      const ddpg::Batch batch = random_batch(5, spec, rng);
      nn::Matrix actions = agent.actor().forward(batch.states);
      agent.scale_actions(actions);
      const double margin = std::min(agent.actor().min_abs_relu_preactivation(batch.states),
                                     agent.critic().min_abs_relu_preactivation(concat(batch.states, actions)));
      if (margin < kKinkMargin && attempt < kMaxRedraws) continue;
      nn::GradTape tape = agent.actor().make_tape();
      agent.actor_objective(batch, &tape);
      // The tape holds d(-J)/d theta.
      for (double& g : tape.params) g = -g;
      corrupt_if(options, "actor-chain", tape.params);
      const auto numeric = nn::numeric_gradient(agent.actor().params(), [&] { return agent.actor_objective(batch); });
      worst = std::max(worst, nn::max_relative_error(tape.params, numeric));
      break;
    }
  }
  return worst;
}

double check_ero_surrogate(const GradientSuiteOptions& options, Rng& rng) {
  double worst = 0.0;
  ero::EroConfig config;
  config.hidden = {8, 8};
  for (int trial = 0; trial < options.trials; ++trial) {
    for (int attempt = 0;; ++attempt) {
      ero::EroPolicy policy(config, rng.next_u64());
      // Widen the head so the check is not dominated by a near-constant 0.5.
      nn::Mlp& net = policy.net();
      const std::size_t head = net.layer_count() - 1;
      for (std::size_t p = net.weight_offset(head); p < net.param_count(); ++p) net.params()[p] = rng.normal();
      const nn::Matrix features = random_matrix(6, ero::kFeatureDim, rng);
      if (net.min_abs_relu_preactivation(features) < kKinkMargin && attempt < kMaxRedraws) continue;
      std::vector<std::uint8_t> bits;
      for (std::size_t j = 0; j < features.rows(); ++j) bits.push_back(rng.bernoulli(0.5) ? 1 : 0);
      const double reward = rng.uniform(0.5, 2.0) * (rng.bernoulli(0.5) ? 1.0 : -1.0);
      nn::GradTape tape = net.make_tape();
      policy.surrogate_loss(features, bits, reward, &tape);
      corrupt_if(options, "ero-surrogate", tape.params);
      const auto numeric =
          nn::numeric_gradient(net.params(), [&] { return policy.surrogate_loss(features, bits, reward); });
      worst = std::max(worst, nn::max_relative_error(tape.params, numeric));
      break;
    }
  }
  return worst;
}

// Compares adam_step with moments written as explicit weighted sums of the
// gradient history rather than the recursive update.
double check_adam_step(const GradientSuiteOptions& options, Rng& rng) {
  double worst = 0.0;
  for (int trial = 0; trial < options.trials; ++trial) {
    const std::size_t n = 1 + rng.index(8);
    const int steps = 1 + static_cast<int>(rng.index(6));
    nn::AdamConfig cfg{rng.uniform(1e-4, 1e-1), 0.9, 0.999, 1e-8};
    std::vector<double> params(n);
    for (double& p : params) p = rng.normal();
    std::vector<double> reference = params;
    nn::AdamState state(n, cfg);
    std::vector<std::vector<double>> history;
    for (int t = 1; t <= steps; ++t) {
      std::vector<double> g(n);
      for (double& v : g) v = rng.normal();
      history.push_back(g);
      nn::adam_step(params, g, state);
      for (std::size_t i = 0; i < n; ++i) {
        double m = 0.0;
        double v = 0.0;
        for (int k = 1; k <= t; ++k) {
          const double gk = history[static_cast<std::size_t>(k - 1)][i];
          m += (1.0 - cfg.beta1) * std::pow(cfg.beta1, t - k) * gk;
          v += (1.0 - cfg.beta2) * std::pow(cfg.beta2, t - k) * gk * gk;
        }
        const double m_hat = m / (1.0 - std::pow(cfg.beta1, t));
        const double v_hat = v / (1.0 - std::pow(cfg.beta2, t));
        reference[i] -= cfg.learning_rate * m_hat / (std::sqrt(v_hat) + cfg.epsilon);
      }
    }
    corrupt_if(options, "adam-step", reference);
    worst = std::max(worst, nn::max_relative_error(params, reference));
  }
  return worst;
}

double check_ou_determinism(const GradientSuiteOptions& options, Rng& rng) {
  double worst = 0.0;
  for (int trial = 0; trial < options.trials; ++trial) {
    const std::uint64_t seed = rng.next_u64();
    ddpg::OuNoise a(2);
    ddpg::OuNoise b(2);
    Rng ra(seed);
    Rng rb(seed);
    for (int k = 0; k < 1000; ++k) {
      const auto xa = a.sample(ra);
      const auto xb = b.sample(rb);
      for (std::size_t i = 0; i < xa.size(); ++i) worst = std::max(worst, nn::relative_error(xa[i], xb[i]));
    }
    // One step from rest with a unit draw lands exactly on sigma.
    ddpg::OuNoise c(1);
    const double draw = 1.0;
    const double x = c.advance(std::span<const double>(&draw, 1))[0];
    std::vector<double> got{x};
    corrupt_if(options, "ou-noise-determinism", got);
    worst = std::max(worst, nn::relative_error(got[0], c.config().sigma));
  }
  return worst;
}

struct Registered {
  const char* name;
  double (*fn)(const GradientSuiteOptions&, Rng&);
};

constexpr Registered kChecks[] = {
    {"mlp", check_mlp},
    {"critic-loss", check_critic_loss},
    {"actor-chain", check_actor_chain},
    {"ero-surrogate", check_ero_surrogate},
    {"adam-step", check_adam_step},
    {"ou-noise-determinism", check_ou_determinism},
};

}  // namespace

std::vector<std::string> gradient_check_names() {
  std::vector<std::string> names;
  for (const auto& c : kChecks) names.emplace_back(c.name);
  return names;
}

std::vector<GradCheckResult> run_gradient_suite(const GradientSuiteOptions& options) {
  std::vector<GradCheckResult> out;
  for (const auto& c : kChecks) {
    Rng rng = Rng::substream(options.seed, c.name);
    GradCheckResult r;
    r.name = c.name;
    r.trials = options.trials;
    r.max_relative_error = c.fn(options, rng);
    r.passed = r.max_relative_error < options.tolerance;
    out.push_back(r);
  }
  return out;
}

}  // namespace replay_opt::harness
