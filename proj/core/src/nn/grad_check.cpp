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

#include "replay_opt/nn/grad_check.hpp"

#include <algorithm>
#include <cmath>

#include "replay_opt/common/errors.hpp"

namespace replay_opt::nn {

double relative_error(double analytic, double numeric) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-8});
  return std::abs(analytic - numeric) / denom;
}

double max_relative_error(std::span<const double> analytic, std::span<const double> numeric) {
  if (analytic.size() != numeric.size()) {
    throw ContractViolation("max_relative_error: size mismatch");
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    worst = std::max(worst, relative_error(analytic[i], numeric[i]));
  }
  return worst;
}

std::vector<double> numeric_gradient(std::span<double> params, const std::function<double()>& loss,
                                     double step) {
  std::vector<double> out(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double saved = params[i];
    params[i] = saved + step;
    const double up = loss();
    params[i] = saved - step;
    const double down = loss();
    params[i] = saved;
    out[i] = (up - down) / (2.0 * step);
  }
  return out;
}

double grad_check(Mlp& net, const OutputLoss& loss, const Matrix& input, double step) {
  ForwardCache cache;
  const Matrix& out = net.forward(input, cache);
  GradTape tape = net.make_tape();
  net.backward(cache, loss.gradient(out), tape);
  const auto numeric = numeric_gradient(net.params(), [&] { return loss.value(net.forward(input)); }, step);
  return max_relative_error(tape.params, numeric);
}

}  // namespace replay_opt::nn
