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

#include <array>
#include <cstddef>
#include <cstdint>

#include "replay_opt/replay/transition.hpp"

namespace replay_opt::ero {

inline constexpr std::size_t kFeatureDim = 3;
using FeatureVector = std::array<double, kFeatureDim>;

/// Raw per-transition inputs of the replay policy.
struct TransitionFeatures {
  double reward = 0.0;
  /// Cached (signed) TD error.
  double td_error = 0.0;
  /// insert_timestep / current_step, in [0, 1].
  double timestep_ratio = 1.0;

  FeatureVector as_array() const { return {reward, td_error, timestep_ratio}; }
};

/// Reads the raw features of `t` as seen at global step `current_step`
/// (which must not precede the insertion step). Step 0 maps to ratio 1.
TransitionFeatures raw_features(const replay::Transition& t, std::uint64_t current_step);

/// Running per-feature mean/variance (Welford). Reward and TD error are
/// standardized with std floored at kStdFloor; the timestep ratio is already
/// bounded in [0, 1] and passes through unchanged.
class FeatureNormalizer {
 public:
  static constexpr double kStdFloor = 1e-6;

  void observe(const TransitionFeatures& f);
  FeatureVector normalize(const TransitionFeatures& f) const;

  /// Overrides the running statistics (count is set to `count`).
  void set_statistics(const FeatureVector& mean, const FeatureVector& variance, std::uint64_t count = 1);

  double mean(std::size_t i) const { return count_ == 0 ? 0.0 : mean_[i]; }
  /// Population variance; 1 before any observation.
  double variance(std::size_t i) const;
  std::uint64_t count() const { return count_; }

 private:
  std::uint64_t count_ = 0;
  FeatureVector mean_{};
  FeatureVector m2_{};
  // When set via set_statistics, variance_ is returned verbatim.
  bool explicit_ = false;
  FeatureVector variance_{1.0, 1.0, 1.0};
};

}  // namespace replay_opt::ero
