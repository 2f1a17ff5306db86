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

#include <functional>
#include <span>

#include "replay_opt/nn/matrix.hpp"
#include "replay_opt/nn/mlp.hpp"

namespace replay_opt::nn {

inline constexpr double kDefaultFdStep = 1e-5;

/// |a - n| / max(|a|, |n|, 1e-8).
double relative_error(double analytic, double numeric);

/// Max relative error between two equally sized gradient vectors.
double max_relative_error(std::span<const double> analytic, std::span<const double> numeric);

/// Central finite differences of `loss` w.r.t. every entry of `params`.
/// Each entry is perturbed in place and restored bit-exactly afterwards.
std::vector<double> numeric_gradient(std::span<double> params, const std::function<double()>& loss,
                                     double step = kDefaultFdStep);

/// Scalar loss on a network output together with its output gradient.
struct OutputLoss {
  std::function<double(const Matrix& output)> value;
  std::function<Matrix(const Matrix& output)> gradient;
};

/// Compares backward() against central differences for every parameter of
/// `net` on `input`. Returns the max relative error; the caller decides on
/// the threshold.
double grad_check(Mlp& net, const OutputLoss& loss, const Matrix& input,
                  double step = kDefaultFdStep);

}  // namespace replay_opt::nn
