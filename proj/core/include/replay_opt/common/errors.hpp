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

#include <cstdint>
#include <stdexcept>
#include <string>

namespace replay_opt {

/// Invalid configuration or construction arguments. Raised before any work.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Caller broke a documented precondition (shape mismatch, stepping a
/// finished episode, ...).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// A loss, gradient or parameter became non-finite.
class NumericFault : public std::runtime_error {
 public:
  explicit NumericFault(const std::string& what, std::int64_t step = -1)
      : std::runtime_error(step >= 0 ? what + " (at step " + std::to_string(step) + ")" : what),
        step_(step) {}

  /// Global environment step at which the fault surfaced, or -1 if unknown.
  std::int64_t step() const noexcept { return step_; }

 private:
  std::int64_t step_;
};

class EmptyBufferError : public std::runtime_error {
 public:
  EmptyBufferError() : std::runtime_error("replay buffer is empty") {}
};

/// Proportional sampling over a tree whose total mass is zero.
class DegeneratePriorityError : public std::runtime_error {
 public:
  DegeneratePriorityError() : std::runtime_error("total priority mass is zero") {}
};

class IoError : public std::runtime_error {
 public:
  IoError(const std::string& path, const std::string& what)
      : std::runtime_error(path + ": " + what), path_(path) {}

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace replay_opt
