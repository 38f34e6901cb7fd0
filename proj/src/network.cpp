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

#include "regnet/network.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <random>
#include <string>

#include <Eigen/Eigenvalues>

#include "regnet/error.hpp"

namespace regnet {

namespace {

constexpr std::size_t kTaps = 9;

// out[o] = b[o] + sum_i w[o][i] * in[i], 3x3 kernels, zero padding.
void conv3x3(const double* in, std::size_t cin, const double* w, const double* b,
             std::size_t cout, std::size_t n, double* out) {
  const std::size_t plane = n * n;
  for (std::size_t o = 0; o < cout; ++o) {
    double* dst = out + o * plane;
    std::fill(dst, dst + plane, b != nullptr ? b[o] : 0.0);
    for (std::size_t i = 0; i < cin; ++i) {
      const double* src = in + i * plane;
      const double* k = w + (o * cin + i) * kTaps;
      for (int ky = 0; ky < 3; ++ky) {
        const int dy = ky - 1;
        const std::size_t y0 = dy < 0 ? 1 : 0;
        const std::size_t y1 = dy > 0 ? n - 1 : n;
        for (int kx = 0; kx < 3; ++kx) {
          const int dx = kx - 1;
          const double wv = k[ky * 3 + kx];
          if (wv == 0.0) continue;
          const std::size_t x0 = dx < 0 ? 1 : 0;
          const std::size_t x1 = dx > 0 ? n - 1 : n;
          for (std::size_t y = y0; y < y1; ++y) {
            double* drow = dst + y * n;
            const double* srow = src + (y + dy) * n + x0 + dx;
            for (std::size_t x = 0; x < x1 - x0; ++x) drow[x0 + x] += wv * srow[x];
          }
        }
      }
    }
  }
}

// Transpose of conv3x3 (without bias): gin[i] += sum_o w[o][i]^T gout[o].
// Accumulates into gin.
void conv3x3_adjoint(const double* gout, std::size_t cout, const double* w, std::size_t cin,
                     std::size_t n, double* gin) {
  const std::size_t plane = n * n;
  for (std::size_t o = 0; o < cout; ++o) {
    const double* g = gout + o * plane;
    for (std::size_t i = 0; i < cin; ++i) {
      double* dst = gin + i * plane;
      const double* k = w + (o * cin + i) * kTaps;
      for (int ky = 0; ky < 3; ++ky) {
        const int dy = ky - 1;
        const std::size_t y0 = dy < 0 ? 1 : 0;
        const std::size_t y1 = dy > 0 ? n - 1 : n;
        for (int kx = 0; kx < 3; ++kx) {
          const int dx = kx - 1;
          const double wv = k[ky * 3 + kx];
          if (wv == 0.0) continue;
          const std::size_t x0 = dx < 0 ? 1 : 0;
          const std::size_t x1 = dx > 0 ? n - 1 : n;
          for (std::size_t y = y0; y < y1; ++y) {
            const double* grow = g + y * n + x0;
            double* drow = dst + (y + dy) * n + x0 + dx;
            for (std::size_t x = 0; x < x1 - x0; ++x) drow[x] += wv * grow[x];
          }
        }
      }
    }
  }
}

// Weight and bias gradients of conv3x3 given the layer input and the
// gradient of its (pre-activation) output. Accumulates.
void conv3x3_param_grad(const double* in, std::size_t cin, const double* gout,
                        std::size_t cout, std::size_t n, double* gw, double* gb) {
  const std::size_t plane = n * n;
  for (std::size_t o = 0; o < cout; ++o) {
    const double* g = gout + o * plane;
    gb[o] += std::accumulate(g, g + plane, 0.0);
    for (std::size_t i = 0; i < cin; ++i) {
      const double* src = in + i * plane;
      double* k = gw + (o * cin + i) * kTaps;
      for (int ky = 0; ky < 3; ++ky) {
        const int dy = ky - 1;
        const std::size_t y0 = dy < 0 ? 1 : 0;
        const std::size_t y1 = dy > 0 ? n - 1 : n;
        for (int kx = 0; kx < 3; ++kx) {
          const int dx = kx - 1;
          const std::size_t x0 = dx < 0 ? 1 : 0;
          const std::size_t x1 = dx > 0 ? n - 1 : n;
          double acc = 0.0;
          for (std::size_t y = y0; y < y1; ++y) {
            const double* grow = g + y * n + x0;
            const double* srow = src + (y + dy) * n + x0 + dx;
            for (std::size_t x = 0; x < x1 - x0; ++x) acc += grow[x] * srow[x];
          }
          k[ky * 3 + kx] += acc;
        }
      }
    }
  }
}

struct ForwardTrace {
  // inputs[l] is the input of layer l; pre[l] its pre-activation output.
  std::vector<std::vector<double>> inputs;
  std::vector<std::vector<double>> pre;
  Vector output;
};

ForwardTrace forward_trace(const NetworkParams& params, const Vector& x) {
  const NetworkArch& arch = params.arch();
  const std::size_t n = arch.side;
  const std::size_t plane = arch.pixels();
  if (static_cast<std::size_t>(x.size()) != plane) {
    throw UsageError("network forward: expected " + std::to_string(plane) +
                     " inputs, got " + std::to_string(x.size()));
  }
  ForwardTrace t;
  const std::size_t depth = arch.layers.size();
  t.inputs.resize(depth);
  t.pre.resize(depth);
  t.inputs[0].assign(x.data(), x.data() + plane);
  for (std::size_t l = 0; l < depth; ++l) {
    const ConvLayerShape& shape = arch.layers[l];
    t.pre[l].resize(shape.out_channels * plane);
    conv3x3(t.inputs[l].data(), shape.in_channels, params.weights(l).data(),
            params.biases(l).data(), shape.out_channels, n, t.pre[l].data());
    if (l + 1 < depth) {
      t.inputs[l + 1].resize(t.pre[l].size());
      std::transform(t.pre[l].begin(), t.pre[l].end(), t.inputs[l + 1].begin(),
                     [](double v) { return v > 0.0 ? v : 0.0; });
    }
  }
  t.output = Eigen::Map<const Vector>(t.pre.back().data(), static_cast<Eigen::Index>(plane));
  if (arch.residual_skip) t.output += x;
  return t;
}

// Accumulates parameter gradients for one sample given dL/d(output).
void backward(const NetworkParams& params, const ForwardTrace& t, const Vector& grad_output,
              std::vector<double>& grad) {
  const NetworkArch& arch = params.arch();
  const std::size_t n = arch.side;
  const std::size_t plane = arch.pixels();
  std::vector<double> g(grad_output.data(), grad_output.data() + plane);
  for (std::size_t l = arch.layers.size(); l-- > 0;) {
    const ConvLayerShape& shape = arch.layers[l];
    if (l + 1 < arch.layers.size()) {
      for (std::size_t p = 0; p < g.size(); ++p) {
        if (!(t.pre[l][p] > 0.0)) g[p] = 0.0;
      }
    }
    conv3x3_param_grad(t.inputs[l].data(), shape.in_channels, g.data(), shape.out_channels, n,
                       grad.data() + arch.weight_offset(l), grad.data() + arch.bias_offset(l));
    if (l > 0) {
      std::vector<double> gin(shape.in_channels * plane, 0.0);
      conv3x3_adjoint(g.data(), shape.out_channels, params.weights(l).data(), shape.in_channels,
                      n, gin.data());
      g = std::move(gin);
    }
  }
}

}  // namespace

NetworkArch NetworkArch::small_cnn(std::size_t side, std::size_t width, bool residual_skip) {
  NetworkArch arch;
  arch.side = side;
  arch.layers = {{1, width}, {width, width}, {width, 1}};
  arch.residual_skip = residual_skip;
  arch.validate();
  return arch;
}

void NetworkArch::validate() const {
  if (side < 1) throw UsageError("network: grid side must be >= 1");
  if (layers.empty()) throw UsageError("network: at least one layer required");
  if (layers.front().in_channels != 1 || layers.back().out_channels != 1) {
    throw UsageError("network: first layer must take 1 channel and last must emit 1");
  }
  for (std::size_t l = 0; l < layers.size(); ++l) {
    if (layers[l].in_channels < 1 || layers[l].out_channels < 1) {
      throw UsageError("network: channel counts must be >= 1");
    }
    if (l > 0 && layers[l].in_channels != layers[l - 1].out_channels) {
      throw UsageError("network: channel counts of consecutive layers do not match");
    }
  }
}

std::size_t NetworkArch::weight_count(std::size_t layer) const {
  return layers.at(layer).in_channels * layers.at(layer).out_channels * kTaps;
}

std::size_t NetworkArch::weight_offset(std::size_t layer) const {
  std::size_t offset = 0;
  for (std::size_t l = 0; l < layer; ++l) offset += weight_count(l) + layers[l].out_channels;
  return offset;
}

std::size_t NetworkArch::parameter_count() const { return weight_offset(layers.size()); }

NetworkParams::NetworkParams(NetworkArch arch, std::vector<double> values, std::uint64_t seed)
    : arch_(std::move(arch)), values_(std::move(values)), seed_(seed) {
  arch_.validate();
  if (values_.size() != arch_.parameter_count()) {
    throw UsageError("network: parameter count does not match architecture");
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw UsageError("network: non-finite parameter");
  }
}

std::span<const double> NetworkParams::weights(std::size_t layer) const {
  return std::span<const double>(values_).subspan(arch_.weight_offset(layer),
                                                  arch_.weight_count(layer));
}
std::span<const double> NetworkParams::biases(std::size_t layer) const {
  return std::span<const double>(values_).subspan(arch_.bias_offset(layer),
                                                  arch_.layers.at(layer).out_channels);
}
std::span<double> NetworkParams::weights(std::size_t layer) {
  return std::span<double>(values_).subspan(arch_.weight_offset(layer),
                                            arch_.weight_count(layer));
}
std::span<double> NetworkParams::biases(std::size_t layer) {
  return std::span<double>(values_).subspan(arch_.bias_offset(layer),
                                            arch_.layers.at(layer).out_channels);
}

NetworkParams init_network(const NetworkArch& arch, std::uint64_t seed) {
  arch.validate();
  std::vector<double> values(arch.parameter_count(), 0.0);
  std::mt19937_64 rng(seed);
  for (std::size_t l = 0; l < arch.layers.size(); ++l) {
    const double fan_in = static_cast<double>(arch.layers[l].in_channels * kTaps);
    std::normal_distribution<double> dist(0.0, std::sqrt(2.0 / fan_in));
    const std::size_t begin = arch.weight_offset(l);
    for (std::size_t k = 0; k < arch.weight_count(l); ++k) values[begin + k] = dist(rng);
  }
  return NetworkParams(arch, std::move(values), seed);
}

Vector forward(const NetworkParams& params, const Vector& x) {
  return forward_trace(params, x).output;
}

double loss_mae(std::span<const Vector> predictions, std::span<const Vector> targets) {
  if (predictions.empty()) throw UsageError("loss_mae: empty batch");
  if (predictions.size() != targets.size()) {
    throw UsageError("loss_mae: prediction and target counts differ");
  }
  double total = 0.0;
  for (std::size_t k = 0; k < predictions.size(); ++k) {
    if (predictions[k].size() != targets[k].size()) {
      throw UsageError("loss_mae: prediction and target shapes differ");
    }
    total += (targets[k] - predictions[k]).lpNorm<1>();
  }
  return total / static_cast<double>(predictions.size());
}

Vector OutputHead::predict(const Vector& input, const Vector& network_output) const {
  Vector out = projection ? projection(network_output) : network_output;
  if (add_input) out += input;
  return out;
}

Gradient grad_backprop(const NetworkParams& params, std::span<const TrainingPair> batch,
                       const OutputHead& head, double scale) {
  if (batch.empty()) throw UsageError("grad_backprop: empty batch");
  Gradient result;
  result.values.assign(params.arch().parameter_count(), 0.0);
  const double weight = scale / static_cast<double>(batch.size());
  for (const TrainingPair& pair : batch) {
    if (pair.target.size() != pair.input.size()) {
      throw UsageError("grad_backprop: input and target shapes differ");
    }
    const ForwardTrace t = forward_trace(params, pair.input);
    if (!t.output.allFinite()) throw NumericError("grad_backprop: non-finite network output");
    const Vector prediction = head.predict(pair.input, t.output);
    const Vector residual = pair.target - prediction;
    result.loss += weight * residual.lpNorm<1>();
    // d/dpred |t - pred| = -sign(t - pred), 0 at the kink
    Vector grad_pred = residual.unaryExpr([weight](double r) {
      return r > 0.0 ? -weight : (r < 0.0 ? weight : 0.0);
    });
    const Vector grad_out = head.projection ? head.projection(grad_pred) : grad_pred;
    backward(params, t, grad_out, result.values);
  }
  return result;
}

TrainState TrainState::for_params(const NetworkParams& params, double learning_rate,
                                  double momentum) {
  if (!(learning_rate > 0.0)) throw UsageError("train: learning rate must be positive");
  if (!(momentum >= 0.0 && momentum < 1.0)) throw UsageError("train: momentum must lie in [0, 1)");
  TrainState state;
  state.momentum_buffer.assign(params.values().size(), 0.0);
  state.learning_rate = learning_rate;
  state.momentum = momentum;
  return state;
}

void sgd_momentum_step(NetworkParams& params, std::span<const double> grad, TrainState& state) {
  std::span<double> values = params.values();
  if (grad.size() != values.size() || state.momentum_buffer.size() != values.size()) {
    throw UsageError("sgd_momentum_step: shape mismatch");
  }
  for (std::size_t k = 0; k < values.size(); ++k) {
    state.momentum_buffer[k] = state.momentum * state.momentum_buffer[k] + grad[k];
    values[k] -= state.learning_rate * state.momentum_buffer[k];
  }
}

double layer_spectral_norm(const NetworkParams& params, std::size_t layer) {
  const NetworkArch& arch = params.arch();
  const ConvLayerShape& shape = arch.layers.at(layer);
  const std::span<const double> w = params.weights(layer);
  if (std::all_of(w.begin(), w.end(), [](double v) { return v == 0.0; })) return 0.0;

  const std::size_t n = arch.side;
  const std::size_t plane = arch.pixels();
  std::vector<double> v(shape.in_channels * plane);
  std::vector<double> av(shape.out_channels * plane);
  std::mt19937_64 rng(0x5eedULL + layer);
  std::normal_distribution<double> dist(0.0, 1.0);
  for (double& e : v) e = dist(rng);

  auto normalize = [](std::vector<double>& x) {
    const double norm = std::sqrt(std::inner_product(x.begin(), x.end(), x.begin(), 0.0));
    if (norm > 0.0) {
      for (double& e : x) e /= norm;
    }
    return norm;
  };
  normalize(v);

  constexpr int kMaxIterations = 10000;
  constexpr double kTolerance = 1e-6;
  double estimate = 0.0;
  for (int it = 0; it < kMaxIterations; ++it) {
    conv3x3(v.data(), shape.in_channels, w.data(), nullptr, shape.out_channels, n, av.data());
    std::fill(v.begin(), v.end(), 0.0);
    conv3x3_adjoint(av.data(), shape.out_channels, w.data(), shape.in_channels, n, v.data());
    // ||W^T W v|| for unit v converges to sigma_max^2.
    const double next = std::sqrt(normalize(v));
    if (next == 0.0) return 0.0;
    if (it > 0 && std::abs(next - estimate) <= kTolerance * next) return next;
    estimate = next;
  }
  throw NumericError("lipschitz_upper_bound: power iteration did not converge");
}

double layer_norm_upper_bound(const NetworkParams& params, std::size_t layer) {
  const NetworkArch& arch = params.arch();
  const ConvLayerShape& shape = arch.layers.at(layer);
  const std::span<const double> w = params.weights(layer);
  const auto cin = static_cast<Eigen::Index>(shape.in_channels);
  const auto cout = static_cast<Eigen::Index>(shape.out_channels);
  // Zero-padded input on an (n+1)-periodic grid never wraps into the support,
  // so the layer is a compression of this circulant operator.
  const std::size_t period = arch.side + 1;
  const double step = 2.0 * std::acos(-1.0) / static_cast<double>(period);
  Eigen::MatrixXcd symbol(cout, cin);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig;
  double worst = 0.0;
  for (std::size_t fy = 0; fy < period; ++fy) {
    for (std::size_t fx = 0; fx < period; ++fx) {
      std::complex<double> phase[kTaps];
      for (std::size_t t = 0; t < kTaps; ++t) {
        const double dy = static_cast<double>(t / 3) - 1.0;
        const double dx = static_cast<double>(t % 3) - 1.0;
        phase[t] = std::polar(1.0, step * (dy * static_cast<double>(fy) + dx * static_cast<double>(fx)));
      }
      for (Eigen::Index o = 0; o < cout; ++o) {
        for (Eigen::Index i = 0; i < cin; ++i) {
          const double* k = w.data() + (o * cin + i) * static_cast<Eigen::Index>(kTaps);
          std::complex<double> acc = 0.0;
          for (std::size_t t = 0; t < kTaps; ++t) acc += k[t] * phase[t];
          symbol(o, i) = acc;
        }
      }
      eig.compute(symbol.adjoint() * symbol, Eigen::EigenvaluesOnly);
      worst = std::max(worst, eig.eigenvalues().maxCoeff());
    }
  }
  // Relative slack for the rounding in the eigenvalue solve.
  return std::sqrt(worst) * (1.0 + 1e-12);
}

double lipschitz_upper_bound(const NetworkParams& params) {
  double bound = 1.0;
  for (std::size_t l = 0; l < params.arch().layers.size(); ++l) {
    bound *= layer_norm_upper_bound(params, l);
  }
  return params.arch().residual_skip ? bound + 1.0 : bound;
}

std::vector<double> train(NetworkParams& params, std::span<const TrainingPair> data,
                          const OutputHead& head, const TrainOptions& options) {
  if (data.empty()) throw UsageError("train: empty training set");
  if (options.batch_size < 1) throw UsageError("train: batch size must be >= 1");
  TrainState state = TrainState::for_params(params, options.learning_rate, options.momentum);
  const double scale =
      options.per_pixel_loss ? 1.0 / static_cast<double>(params.arch().pixels()) : 1.0;

  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(options.shuffle_seed);
  std::vector<double> epoch_losses;
  std::vector<TrainingPair> batch;
  for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double total = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < order.size(); start += options.batch_size) {
      const std::size_t stop = std::min(order.size(), start + options.batch_size);
      batch.clear();
      for (std::size_t k = start; k < stop; ++k) batch.push_back(data[order[k]]);
      const Gradient g = grad_backprop(params, batch, head, scale);
      if (!std::isfinite(g.loss)) {
        throw NumericError("train: loss became non-finite in epoch " + std::to_string(epoch));
      }
      sgd_momentum_step(params, g.values, state);
      total += g.loss;
      ++batches;
    }
    for (double v : params.values()) {
      if (!std::isfinite(v)) {
        throw NumericError("train: parameters diverged in epoch " + std::to_string(epoch));
      }
    }
    state.epoch = epoch + 1;
    const double mean = total / static_cast<double>(batches);
    epoch_losses.push_back(mean);
    if (options.on_epoch) options.on_epoch(epoch, mean);
  }
  return epoch_losses;
}

}  // namespace regnet
