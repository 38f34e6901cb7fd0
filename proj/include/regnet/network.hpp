// Copyright 2026 The RegNet Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "regnet/linop.hpp"

namespace regnet {

struct ConvLayerShape {
  std::size_t in_channels = 1;
  std::size_t out_channels = 1;

  bool operator==(const ConvLayerShape&) const = default;
};

// Stack of 3x3 zero-padded, stride-1 convolutions on an N x N image. Every
// layer except the last is followed by max(., 0). With `residual_skip` the
// network computes x + net(x).
struct NetworkArch {
  std::size_t side = 0;
  std::vector<ConvLayerShape> layers;
  bool residual_skip = false;

  // 1 -> width -> width -> 1.
  static NetworkArch small_cnn(std::size_t side, std::size_t width = 16,
                               bool residual_skip = false);

  void validate() const;
  std::size_t pixels() const { return side * side; }
  std::size_t weight_count(std::size_t layer) const;
  std::size_t parameter_count() const;
  // Offset of layer `layer`'s weights in the flat parameter vector; its
  // biases follow immediately.
  std::size_t weight_offset(std::size_t layer) const;
  std::size_t bias_offset(std::size_t layer) const {
    return weight_offset(layer) + weight_count(layer);
  }

  bool operator==(const NetworkArch&) const = default;
};

// Flat parameter vector: for each layer, weights [out][in][3][3] then biases.
class NetworkParams {
 public:
  NetworkParams(NetworkArch arch, std::vector<double> values, std::uint64_t seed);

  const NetworkArch& arch() const { return arch_; }
  std::uint64_t seed() const { return seed_; }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

  std::span<const double> weights(std::size_t layer) const;
  std::span<const double> biases(std::size_t layer) const;
  std::span<double> weights(std::size_t layer);
  std::span<double> biases(std::size_t layer);

 private:
  NetworkArch arch_;
  std::vector<double> values_;
  std::uint64_t seed_;
};

// He-normal weights (std = sqrt(2 / fan_in)), zero biases. Deterministic in seed.
NetworkParams init_network(const NetworkArch& arch, std::uint64_t seed);

// x is an N x N image in row-major order.
Vector forward(const NetworkParams& params, const Vector& x);

// (1/K) sum_k ||targets_k - predictions_k||_1
double loss_mae(std::span<const Vector> predictions, std::span<const Vector> targets);

struct TrainingPair {
  Vector input;
  Vector target;
};

// Maps the network output f(z) to a prediction:
//   prediction = (add_input ? z : 0) + projection(f(z)).
// An empty projection is the identity. The projection must be self-adjoint
// (orthogonal projectors are), since its adjoint is taken to be itself.
struct OutputHead {
  bool add_input = false;
  std::function<Vector(const Vector&)> projection;

  Vector predict(const Vector& input, const Vector& network_output) const;
};

struct Gradient {
  double loss = 0.0;
  std::vector<double> values;
};

// Reverse-mode gradient of scale * (1/K) sum_k ||target_k - prediction_k||_1.
// The subgradient at the l1 kink and at ReLU(0) is 0.
Gradient grad_backprop(const NetworkParams& params, std::span<const TrainingPair> batch,
                       const OutputHead& head = {}, double scale = 1.0);

struct TrainState {
  std::vector<double> momentum_buffer;
  double learning_rate = 0.05;
  double momentum = 0.99;
  std::size_t epoch = 0;

  static TrainState for_params(const NetworkParams& params, double learning_rate,
                               double momentum);
};

// buffer <- momentum * buffer + grad; param <- param - lr * buffer.
void sgd_momentum_step(NetworkParams& params, std::span<const double> grad, TrainState& state);

// Product of layer_norm_upper_bound over the layers; +1 with a residual skip.
// Upper-bounds the Lipschitz constant of forward() in the Euclidean norm.
double lipschitz_upper_bound(const NetworkParams& params);

// Largest singular value of layer `layer`'s linear part, by power iteration
// (relative accuracy about 1e-6, approached from below).
double layer_spectral_norm(const NetworkParams& params, std::size_t layer);

// Guaranteed upper bound on layer_spectral_norm: the largest norm of the
// per-frequency channel matrix of the equivalent (N+1)-periodic convolution.
double layer_norm_upper_bound(const NetworkParams& params, std::size_t layer);

struct TrainOptions {
  double learning_rate = 0.05;
  double momentum = 0.99;
  std::size_t epochs = 10;
  std::size_t batch_size = 10;
  std::uint64_t shuffle_seed = 0;
  // Divide the l1 loss by the pixel count, i.e. optimise the per-pixel mean
  // absolute error.
  bool per_pixel_loss = true;
  std::function<void(std::size_t epoch, double mean_loss)> on_epoch;
};

// Mini-batch SGD with momentum. Returns the mean batch loss of every epoch.
// Throws NumericError when the loss becomes non-finite.
std::vector<double> train(NetworkParams& params, std::span<const TrainingPair> data,
                          const OutputHead& head, const TrainOptions& options);

}  // namespace regnet
