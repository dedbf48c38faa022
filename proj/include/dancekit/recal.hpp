/* Copyright 2026 The Dancekit Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Recurrent recalibration of primitive sequences: a pooling block maps the
// pair (current primitive, noised previous output) to the next output over
// the 126 joint-rotation channels, strictly left to right. The remaining 13
// channels pass through untouched.

#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "dancekit/motion.hpp"

namespace dk::recal {

constexpr int kPoolLen = motion::layout::kJointRotationDims;  // 126
constexpr int kPoolRows = 2;
constexpr int kPoolInputSize = kPoolRows * kPoolLen;  // 252

enum class Activation { Identity, Tanh };

// Inference-only batch normalization: stored running statistics, never batch
// statistics, so the block stays a pure per-item function.
struct BatchNorm {
  std::vector<double> running_mean;
  std::vector<double> running_var;
  std::vector<double> gamma;
  std::vector<double> beta;
  double epsilon = 1e-5;
};

struct ConvLayer {
  int in_channels = 0;
  int out_channels = 0;
  int kernel_size = 0;                // odd; symmetric zero padding (k-1)/2
  std::vector<double> weights;        // row-major out x in x kernel
  std::vector<double> bias;           // out entries
  Activation activation = Activation::Identity;
  std::optional<BatchNorm> batchnorm;
};

struct PoolingParams {
  bool normalize = false;
  std::vector<double> ln_gamma;  // 252 entries when normalize
  std::vector<double> ln_beta;   // 252 entries when normalize
  std::vector<ConvLayer> conv_layers;

  // Throws a config error on channel mismatch, even kernels, bad sizes,
  // non-finite parameters, or non-positive running variances.
  void validate() const;
};

struct NoiseConfig {
  double threshold = 0.0;  // std of the injected Gaussian, channel units
  std::uint64_t seed = 0;
  bool enabled = true;
};

struct RecalConfig {
  PoolingParams params;
  NoiseConfig noise;
};

struct LayerSpec {
  int in_channels;
  int out_channels;
  int kernel_size;
};

// Single 1x1 layer selecting the current primitive: the identity on
// sequences when noise is off.
PoolingParams passthrough_params();

// Single 1x1 layer computing alpha * current + (1 - alpha) * previous.
PoolingParams ema_params(double alpha);

// Three conv(k=3) blocks 2->8->8->1, tanh + batchnorm each, layer norm on.
std::vector<LayerSpec> default_arch();

// Deterministic fan-in scaled uniform initialization; same seed gives
// bit-identical parameters.
PoolingParams init_params(std::uint64_t seed, const std::vector<LayerSpec>& arch);

// v + eps, eps[c] = threshold * z(seed, stream_index, c). Linear in
// threshold by construction; exact copy when disabled or threshold is 0.
std::array<double, kPoolLen> add_noise(std::span<const double, kPoolLen> v,
                                       const NoiseConfig& cfg,
                                       std::uint64_t stream_index);

// pair is row-major 2x126: row 0 the current primitive's joint rotations,
// row 1 the (noised) previous output.
std::array<double, kPoolLen> pooling_block(
    std::span<const double, kPoolInputSize> pair, const PoolingParams& params);

motion::Primitive recalibrate_step(const motion::Primitive& gd_i,
                                   const motion::Primitive& grd_prev,
                                   const RecalConfig& cfg,
                                   std::uint64_t step_index);

motion::PrimitiveSequence recalibrate_sequence(
    const motion::PrimitiveSequence& seq, const RecalConfig& cfg);

// d output[r] / d pair[c], 126 x 252, by forward-composed layer Jacobians.
Eigen::MatrixXd pooling_jacobian_analytic(
    std::span<const double, kPoolInputSize> pair, const PoolingParams& params);

// Central differences, one column per input coordinate.
Eigen::MatrixXd pooling_jacobian_fd(std::span<const double, kPoolInputSize> pair,
                                    const PoolingParams& params,
                                    double eps = 1e-4);

}  // namespace dk::recal
