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

#include "replay_opt/harness/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

#include "replay_opt/common/errors.hpp"
#include "replay_opt/envs/env.hpp"
#include "replay_opt/harness/metrics.hpp"

namespace replay_opt::harness {

namespace {

std::string_view trim(std::string_view s) {
  const auto not_space = [](char c) { return c != ' ' && c != '\t' && c != '\r' && c != '\n'; };
  while (!s.empty() && !not_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && !not_space(s.back())) s.remove_suffix(1);
  return s;
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, std::string_view expected) {
  throw ConfigError("invalid value '" + std::string(value) + "' for " + std::string(key) + " (expected " +
                    std::string(expected) + ")");
}

std::uint64_t parse_u64(std::string_view key, std::string_view v) {
  v = trim(v);
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size() || v.empty()) bad_value(key, v, "non-negative integer");
  return out;
}

double parse_real(std::string_view key, std::string_view v) {
  v = trim(v);
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size() || v.empty()) bad_value(key, v, "real number");
  return out;
}

bool parse_bool(std::string_view key, std::string_view v) {
  v = trim(v);
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  bad_value(key, v, "true|false");
}

std::vector<std::string> split_list(std::string_view v) {
  std::vector<std::string> out;
  v = trim(v);
  if (!v.empty() && v.front() == '[' && v.back() == ']') v = trim(v.substr(1, v.size() - 2));
  while (!v.empty()) {
    const auto comma = v.find(',');
    const std::string_view item = trim(v.substr(0, comma));
    if (!item.empty()) out.emplace_back(item);
    if (comma == std::string_view::npos) break;
    v.remove_prefix(comma + 1);
  }
  return out;
}

std::vector<std::size_t> parse_widths(std::string_view key, std::string_view v) {
  std::vector<std::size_t> out;
  for (const auto& item : split_list(v)) out.push_back(static_cast<std::size_t>(parse_u64(key, item)));
  if (out.empty()) bad_value(key, v, "comma-separated layer widths");
  return out;
}

template <typename T>
std::string join(const std::vector<T>& items, const std::function<std::string(const T&)>& fmt) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ",";
    out += fmt(items[i]);
  }
  return out;
}

std::string widths_text(const std::vector<std::size_t>& w) {
  return join<std::size_t>(w, [](const std::size_t& x) { return std::to_string(x); });
}

std::string bool_text(bool b) { return b ? "true" : "false"; }

struct Setting {
  std::string_view key;
  std::function<void(ExperimentConfig&, std::string_view key, std::string_view value)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

#define RO_U64(KEY, FIELD)                                                                          \
  Setting {                                                                                         \
    KEY, [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.FIELD = parse_u64(k, v); }, \
        [](const ExperimentConfig& c) { return std::to_string(c.FIELD); }                           \
  }
#define RO_SIZE(KEY, FIELD)                                                                          \
  Setting {                                                                                          \
    KEY,                                                                                             \
        [](ExperimentConfig& c, std::string_view k, std::string_view v) {                            \
          c.FIELD = static_cast<std::size_t>(parse_u64(k, v));                                       \
        },                                                                                           \
        [](const ExperimentConfig& c) { return std::to_string(c.FIELD); }                            \
  }
#define RO_REAL(KEY, FIELD)                                                                            \
  Setting {                                                                                            \
    KEY, [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.FIELD = parse_real(k, v); }, \
        [](const ExperimentConfig& c) { return format_real(c.FIELD); }                                 \
  }
#define RO_BOOL(KEY, FIELD)                                                                            \
  Setting {                                                                                            \
    KEY, [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.FIELD = parse_bool(k, v); }, \
        [](const ExperimentConfig& c) { return bool_text(c.FIELD); }                                   \
  }

const std::vector<Setting>& registry() {
  static const std::vector<Setting> settings = {
      Setting{"env",
              [](ExperimentConfig& c, std::string_view, std::string_view v) {
                const std::string name(trim(v));
                envs::make_environment(name);  // validates
                c.base.env = name;
              },
              [](const ExperimentConfig& c) { return c.base.env; }},
      Setting{"sampler",
              [](ExperimentConfig& c, std::string_view, std::string_view v) {
                c.base.sampler = replay::parse_sampler_kind(trim(v));
              },
              [](const ExperimentConfig& c) { return std::string(replay::to_string(c.base.sampler)); }},
      RO_U64("total_timesteps", base.total_timesteps),
      RO_U64("rollout_steps", base.rollout_steps),
      RO_U64("train_steps_per_iter", base.train_steps_per_iter),
      RO_U64("batch_size", base.batch_size),
      RO_U64("buffer_capacity", base.buffer_capacity),
      RO_U64("warmup", base.warmup),
      RO_U64("seed", base.seed),
      RO_U64("trace_interval", base.trace_interval),
      RO_U64("eval_every", base.eval_every),
      RO_BOOL("snapshot", base.snapshot),
      Setting{"out_dir",
              [](ExperimentConfig& c, std::string_view, std::string_view v) { c.base.out_dir = std::string(trim(v)); },
              [](const ExperimentConfig& c) { return c.base.out_dir; }},
      Setting{"ddpg.hidden",
              [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.base.ddpg.hidden = parse_widths(k, v); },
              [](const ExperimentConfig& c) { return widths_text(c.base.ddpg.hidden); }},
      RO_REAL("ddpg.actor_lr", base.ddpg.actor_lr),
      RO_REAL("ddpg.critic_lr", base.ddpg.critic_lr),
      RO_REAL("ddpg.gamma", base.ddpg.gamma),
      RO_REAL("ddpg.tau", base.ddpg.tau),
      RO_REAL("ddpg.output_init", base.ddpg.output_init),
      RO_REAL("ou.theta", base.ou.theta),
      RO_REAL("ou.sigma", base.ou.sigma),
      RO_REAL("ou.dt", base.ou.dt),
      RO_REAL("per.alpha", base.per.alpha),
      RO_REAL("per.beta0", base.per.beta0),
      RO_REAL("per.epsilon", base.per.epsilon),
      RO_SIZE("per.rank_refresh_interval", base.per.rank_refresh_interval),
      Setting{"ero.hidden",
              [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.base.ero.hidden = parse_widths(k, v); },
              [](const ExperimentConfig& c) { return widths_text(c.base.ero.hidden); }},
      RO_REAL("ero.learning_rate", base.ero.learning_rate),
      RO_SIZE("ero.replay_updating_steps", base.ero.replay_updating_steps),
      RO_SIZE("ero.batch_size", base.ero.batch_size),
      RO_SIZE("ero.reward_window", base.ero.reward_window),
      RO_BOOL("ero.subset_strict", base.subset_strict),
      RO_BOOL("ero.subset_refresh_always", base.ero.subset_refresh_always),
      RO_BOOL("ero.lazy_refresh", base.ero.lazy_refresh),
      Setting{"compare.samplers",
              [](ExperimentConfig& c, std::string_view, std::string_view v) {
                c.samplers.clear();
                for (const auto& s : split_list(v)) c.samplers.push_back(replay::parse_sampler_kind(s));
              },
              [](const ExperimentConfig& c) {
                return join<replay::SamplerKind>(c.samplers, [](const replay::SamplerKind& k) {
                  return std::string(replay::to_string(k));
                });
              }},
      Setting{"compare.seeds",
              [](ExperimentConfig& c, std::string_view k, std::string_view v) {
                c.seeds.clear();
                for (const auto& s : split_list(v)) c.seeds.push_back(parse_u64(k, s));
              },
              [](const ExperimentConfig& c) {
                return join<std::uint64_t>(c.seeds, [](const std::uint64_t& s) { return std::to_string(s); });
              }},
      Setting{"compare.envs",
              [](ExperimentConfig& c, std::string_view, std::string_view v) {
                c.envs.clear();
                for (const auto& s : split_list(v)) {
                  envs::make_environment(s);
                  c.envs.push_back(s);
                }
              },
              [](const ExperimentConfig& c) {
                return join<std::string>(c.envs, [](const std::string& s) { return s; });
              }},
  };
  return settings;
}

#undef RO_U64
#undef RO_SIZE
#undef RO_REAL
#undef RO_BOOL

const Setting& find_setting(std::string_view key) {
  const auto& reg = registry();
  const auto it = std::find_if(reg.begin(), reg.end(), [&](const Setting& s) { return s.key == key; });
  if (it == reg.end()) throw ConfigError("unknown config key '" + std::string(key) + "'");
  return *it;
}

}  // namespace

void RunConfig::validate() const {
  envs::make_environment(env);
  const auto positive = [](std::uint64_t v, const char* name) {
    if (v == 0) throw ConfigError(std::string(name) + " must be positive");
  };
  positive(rollout_steps, "rollout_steps");
  positive(batch_size, "batch_size");
  positive(buffer_capacity, "buffer_capacity");
  positive(trace_interval, "trace_interval");
  if (ddpg.hidden.empty() || ero.hidden.empty()) throw ConfigError("hidden layer lists must be non-empty");
  for (auto w : ddpg.hidden) positive(w, "ddpg.hidden");
  for (auto w : ero.hidden) positive(w, "ero.hidden");
  if (!(ddpg.gamma > 0.0 && ddpg.gamma < 1.0)) throw ConfigError("ddpg.gamma must be in (0, 1)");
  if (!(ddpg.tau > 0.0 && ddpg.tau <= 1.0)) throw ConfigError("ddpg.tau must be in (0, 1]");
  if (!(ddpg.actor_lr > 0.0) || !(ddpg.critic_lr > 0.0) || !(ero.learning_rate > 0.0)) {
    throw ConfigError("learning rates must be positive");
  }
  if (!(ou.theta >= 0.0) || !(ou.sigma >= 0.0) || !(ou.dt > 0.0)) throw ConfigError("invalid OU parameters");
  if (!(per.alpha >= 0.0)) throw ConfigError("per.alpha must be >= 0");
  if (!(per.beta0 >= 0.0 && per.beta0 <= 1.0)) throw ConfigError("per.beta0 must be in [0, 1]");
  if (!(per.epsilon > 0.0)) throw ConfigError("per.epsilon must be positive");
  positive(per.rank_refresh_interval, "per.rank_refresh_interval");
  positive(ero.batch_size, "ero.batch_size");
  positive(ero.reward_window, "ero.reward_window");
}

void apply_setting(ExperimentConfig& config, std::string_view key, std::string_view value) {
  const Setting& s = find_setting(trim(key));
  s.set(config, s.key, value);
}

void apply_setting(RunConfig& config, std::string_view key, std::string_view value) {
  if (trim(key).starts_with("compare.")) throw ConfigError("'" + std::string(key) + "' is not a run setting");
  ExperimentConfig wrapper{config, {}, {}, {}};
  apply_setting(wrapper, key, value);
  config = std::move(wrapper.base);
}

std::string get_setting(const ExperimentConfig& config, std::string_view key) {
  return find_setting(trim(key)).get(config);
}

std::vector<std::string> setting_keys() {
  std::vector<std::string> keys;
  for (const auto& s : registry()) keys.emplace_back(s.key);
  return keys;
}

std::pair<std::string, std::string> split_assignment(std::string_view text) {
  const auto eq = text.find('=');
  if (eq == std::string_view::npos) throw ConfigError("expected key=value, got '" + std::string(text) + "'");
  return {std::string(trim(text.substr(0, eq))), std::string(trim(text.substr(eq + 1)))};
}

ExperimentConfig parse_config_text(std::string_view text, ExperimentConfig base) {
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    try {
      const auto [key, value] = split_assignment(line);
      apply_setting(base, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return base;
}

ExperimentConfig load_config_file(const std::string& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config_text(ss.str(), std::move(base));
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

std::string dump_config(const ExperimentConfig& config) {
  std::string out;
  for (const auto& s : registry()) {
    out += s.key;
    out += " = ";
    out += s.get(config);
    out += '\n';
  }
  return out;
}

}  // namespace replay_opt::harness
