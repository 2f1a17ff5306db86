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

#include "replay_opt/nn/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "replay_opt/common/errors.hpp"
#include "replay_opt/common/rng.hpp"

namespace replay_opt::nn {

std::string_view to_string(Activation a) {
  switch (a) {
    case Activation::kLinear: return "linear";
    case Activation::kTanh: return "tanh";
    case Activation::kRelu: return "relu";
    case Activation::kSigmoid: return "sigmoid";
  }
  return "?";
}

void GradTape::zero() {
  std::fill(params.begin(), params.end(), 0.0);
  input.fill(0.0);
}

namespace {

void validate(const std::vector<std::size_t>& sizes, const std::vector<Activation>& acts) {
  if (sizes.size() < 2) throw ConfigError("Mlp: need at least input and output layer sizes");
  for (std::size_t s : sizes) {
    if (s == 0) throw ConfigError("Mlp: layer sizes must be positive");
  }
  if (acts.size() != sizes.size() - 1) {
    throw ConfigError("Mlp: expected " + std::to_string(sizes.size() - 1) + " activations, got " +
                      std::to_string(acts.size()));
  }
}

double sigmoid(double z) {
  const double s = z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
  return std::clamp(s, kSigmoidFloor, 1.0 - kSigmoidFloor);
}

void activate(Activation a, std::span<const double> pre, std::span<double> out) {
  switch (a) {
    case Activation::kLinear:
      std::copy(pre.begin(), pre.end(), out.begin());
      break;
    case Activation::kTanh:
      for (std::size_t i = 0; i < pre.size(); ++i) out[i] = std::tanh(pre[i]);
      break;
    case Activation::kRelu:
      for (std::size_t i = 0; i < pre.size(); ++i) out[i] = pre[i] > 0.0 ? pre[i] : 0.0;
      break;
    case Activation::kSigmoid:
      for (std::size_t i = 0; i < pre.size(); ++i) out[i] = sigmoid(pre[i]);
      break;
  }
}

// grad <- grad * f'(pre), using the cached post-activation where cheaper.
void activation_backward(Activation a, std::span<const double> pre, std::span<const double> post,
                         std::span<double> grad) {
  switch (a) {
    case Activation::kLinear:
      break;
    case Activation::kTanh:
      for (std::size_t i = 0; i < grad.size(); ++i) grad[i] *= 1.0 - post[i] * post[i];
      break;
    case Activation::kRelu:
      for (std::size_t i = 0; i < grad.size(); ++i) {
        if (!(pre[i] > 0.0)) grad[i] = 0.0;
      }
      break;
    case Activation::kSigmoid:
      for (std::size_t i = 0; i < grad.size(); ++i) grad[i] *= post[i] * (1.0 - post[i]);
      break;
  }
}

// out = in * W + b for every row.
void affine(const double* w, const double* b, const Matrix& in, std::size_t out_width,
            Matrix& out) {
  // Register tile of kRows x kCols outputs. Every output still accumulates
  // bias first, then inputs in ascending order, so results do not depend on
  // the batch size.
  constexpr std::size_t kRows = 4;
  constexpr std::size_t kCols = 8;
  const std::size_t in_width = in.cols();
  const std::size_t rows = in.rows();
  out.resize(rows, out_width);
  std::size_t r = 0;
  for (; r + kRows <= rows; r += kRows) {
    const double* x[kRows];
    double* o[kRows];
    for (std::size_t k = 0; k < kRows; ++k) {
      x[k] = in.row(r + k).data();
      o[k] = out.row(r + k).data();
    }
    std::size_t j = 0;
    for (; j + kCols <= out_width; j += kCols) {
      double acc[kRows][kCols];
      for (std::size_t k = 0; k < kRows; ++k)
        for (std::size_t c = 0; c < kCols; ++c) acc[k][c] = b[j + c];
      for (std::size_t i = 0; i < in_width; ++i) {
        const double* wi = w + i * out_width + j;
        for (std::size_t k = 0; k < kRows; ++k) {
          const double xi = x[k][i];
          for (std::size_t c = 0; c < kCols; ++c) acc[k][c] += xi * wi[c];
        }
      }
      for (std::size_t k = 0; k < kRows; ++k)
        for (std::size_t c = 0; c < kCols; ++c) o[k][j + c] = acc[k][c];
    }
    for (; j < out_width; ++j) {
      for (std::size_t k = 0; k < kRows; ++k) {
        double s = b[j];
        for (std::size_t i = 0; i < in_width; ++i) s += x[k][i] * w[i * out_width + j];
        o[k][j] = s;
      }
    }
  }
  for (; r < rows; ++r) {
    double* o = out.row(r).data();
    std::copy(b, b + out_width, o);
    const double* x = in.row(r).data();
    for (std::size_t i = 0; i < in_width; ++i) {
      const double xi = x[i];
      const double* wi = w + i * out_width;
      for (std::size_t j = 0; j < out_width; ++j) o[j] += xi * wi[j];
    }
  }
}

}  // namespace

Mlp::Mlp(std::vector<std::size_t> layer_sizes, std::vector<Activation> activations,
         std::uint64_t seed, InitScheme init)
    : Mlp(zeros(std::move(layer_sizes), std::move(activations))) {
  Rng rng(seed);
  for (std::size_t l = 0; l < layer_count(); ++l) {
    const std::size_t in = sizes_[l];
    const std::size_t out = sizes_[l + 1];
    const bool is_output = l + 1 == layer_count();
    const double range =
        is_output && init.output_range ? *init.output_range : 1.0 / std::sqrt(static_cast<double>(in));
    std::uniform_real_distribution<double> dist(-range, range);
    double* block = params_.data() + offsets_[l];
    for (std::size_t k = 0; k < (in + 1) * out; ++k) block[k] = dist(rng.engine());
  }
}

Mlp Mlp::zeros(std::vector<std::size_t> layer_sizes, std::vector<Activation> activations) {
  validate(layer_sizes, activations);
  Mlp net;
  net.sizes_ = std::move(layer_sizes);
  net.activations_ = std::move(activations);
  std::size_t total = 0;
  for (std::size_t l = 0; l + 1 < net.sizes_.size(); ++l) {
    net.offsets_.push_back(total);
    total += (net.sizes_[l] + 1) * net.sizes_[l + 1];
  }
  net.params_.assign(total, 0.0);
  return net;
}

std::size_t Mlp::layer_of(std::size_t p) const {
  auto it = std::upper_bound(offsets_.begin(), offsets_.end(), p);
  return static_cast<std::size_t>(it - offsets_.begin()) - 1;
}

double& Mlp::weight(std::size_t layer, std::size_t in, std::size_t out) {
  return params_[offsets_[layer] + in * sizes_[layer + 1] + out];
}

double& Mlp::bias(std::size_t layer, std::size_t out) {
  return params_[offsets_[layer] + sizes_[layer] * sizes_[layer + 1] + out];
}

Matrix Mlp::forward(const Matrix& batch) const {
  ForwardCache cache;
  return forward(batch, cache);
}

const Matrix& Mlp::forward(const Matrix& batch, ForwardCache& cache) const {
  if (batch.cols() != input_width()) {
    throw ContractViolation("Mlp::forward: input width " + std::to_string(batch.cols()) +
                            " != " + std::to_string(input_width()));
  }
  const std::size_t layers = layer_count();
  cache.values.resize(layers + 1);
  cache.pre.resize(layers);
  cache.values[0] = batch;
  for (std::size_t l = 0; l < layers; ++l) {
    const std::size_t in = sizes_[l];
    const std::size_t out = sizes_[l + 1];
    const double* w = params_.data() + offsets_[l];
    affine(w, w + in * out, cache.values[l], out, cache.pre[l]);
    Matrix& post = cache.values[l + 1];
    post.resize(batch.rows(), out);
    activate(activations_[l], cache.pre[l].data(), post.data());
  }
  return cache.values.back();
}

void Mlp::backward(const ForwardCache& cache, const Matrix& output_grad, GradTape& tape,
                   bool param_grads) const {
  const std::size_t layers = layer_count();
  if (cache.values.size() != layers + 1) {
    throw ContractViolation("Mlp::backward: cache does not match this network");
  }
  const Matrix& out = cache.values.back();
  if (output_grad.rows() != out.rows() || output_grad.cols() != out.cols()) {
    throw ContractViolation("Mlp::backward: output gradient shape mismatch");
  }
  if (param_grads && tape.params.size() != params_.size()) {
    throw ContractViolation("Mlp::backward: tape does not match this network");
  }
  const std::size_t batch = out.rows();
  Matrix grad = output_grad;
  Matrix next;
  for (std::size_t l = layers; l-- > 0;) {
    const std::size_t in = sizes_[l];
    const std::size_t width = sizes_[l + 1];
    activation_backward(activations_[l], cache.pre[l].data(), cache.values[l + 1].data(), grad.data());
    const Matrix& x = cache.values[l];
    const double* w = params_.data() + offsets_[l];
    if (param_grads) {
      double* gw = tape.params.data() + offsets_[l];
      double* gb = gw + in * width;
      for (std::size_t r = 0; r < batch; ++r) {
        const double* g = grad.row(r).data();
        const double* xr = x.row(r).data();
        for (std::size_t i = 0; i < in; ++i) {
          const double xi = xr[i];
          double* gwi = gw + i * width;
          for (std::size_t j = 0; j < width; ++j) gwi[j] += xi * g[j];
        }
        for (std::size_t j = 0; j < width; ++j) gb[j] += g[j];
      }
    }
    next.resize(batch, in);
    for (std::size_t r = 0; r < batch; ++r) {
      const double* g = grad.row(r).data();
      double* n = next.row(r).data();
      for (std::size_t i = 0; i < in; ++i) {
        const double* wi = w + i * width;
        double s = 0.0;
        for (std::size_t j = 0; j < width; ++j) s += wi[j] * g[j];
        n[i] = s;
      }
    }
    std::swap(grad, next);
  }
  if (tape.input.rows() != grad.rows() || tape.input.cols() != grad.cols()) {
    tape.input = grad;
  } else {
    auto dst = tape.input.data();
    auto src = grad.data();
    for (std::size_t k = 0; k < dst.size(); ++k) dst[k] += src[k];
  }
}

double Mlp::min_abs_relu_preactivation(const Matrix& batch) const {
  ForwardCache cache;
  forward(batch, cache);
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t l = 0; l < layer_count(); ++l) {
    if (activations_[l] != Activation::kRelu) continue;
    for (double z : cache.pre[l].data()) m = std::min(m, std::abs(z));
  }
  return m;
}

}  // namespace replay_opt::nn
