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

#include "replay_opt/envs/env.hpp"

#include "replay_opt/common/errors.hpp"
#include "replay_opt/envs/pendulum.hpp"
#include "replay_opt/envs/point_reacher.hpp"

namespace replay_opt::envs {

std::unique_ptr<Environment> make_environment(std::string_view name) {
  if (name == "pendulum") return std::make_unique<Pendulum>();
  if (name == "point_reacher") return std::make_unique<PointReacher>();
  throw ConfigError("unknown environment '" + std::string(name) + "'");
}

std::vector<std::string> environment_names() { return {"pendulum", "point_reacher"}; }

}  // namespace replay_opt::envs
