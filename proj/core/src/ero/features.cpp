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

#include "replay_opt/ero/features.hpp"

#include <algorithm>
#include <cmath>

#include "replay_opt/common/errors.hpp"

namespace replay_opt::ero {

TransitionFeatures raw_features(const replay::Transition& t, std::uint64_t current_step) {
  if (current_step < t.insert_timestep) {
    throw ContractViolation("raw_features: current step precedes the insertion step");
  }
  TransitionFeatures f;
  f.reward = t.reward;
  f.td_error = t.td_error;
  f.timestep_ratio =
      current_step == 0 ? 1.0 : static_cast<double>(t.insert_timestep) / static_cast<double>(current_step);
  return f;
}

void FeatureNormalizer::observe(const TransitionFeatures& f) {
  const FeatureVector x = f.as_array();
  ++count_;
  const double n = static_cast<double>(count_);
  for (std::size_t i = 0; i < kFeatureDim; ++i) {
    const double delta = x[i] - mean_[i];
    mean_[i] += delta / n;
    m2_[i] += delta * (x[i] - mean_[i]);
  }
  explicit_ = false;
}

double FeatureNormalizer::variance(std::size_t i) const {
  if (explicit_) return variance_[i];
  if (count_ == 0) return 1.0;
  return std::max(0.0, m2_[i] / static_cast<double>(count_));
}

void FeatureNormalizer::set_statistics(const FeatureVector& mean, const FeatureVector& variance,
                                       std::uint64_t count) {
  mean_ = mean;
  variance_ = variance;
  for (std::size_t i = 0; i < kFeatureDim; ++i) m2_[i] = variance[i] * static_cast<double>(count);
  count_ = count;
  explicit_ = true;
}

FeatureVector FeatureNormalizer::normalize(const TransitionFeatures& f) const {
  FeatureVector x = f.as_array();
  // Reward and TD error only; the ratio is index 2.
  for (std::size_t i = 0; i < 2; ++i) {
    const double sd = std::max(std::sqrt(variance(i)), kStdFloor);
    x[i] = (x[i] - mean(i)) / sd;
  }
  return x;
}

}  // namespace replay_opt::ero
