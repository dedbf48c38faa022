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

#include "dancekit/recal.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dancekit/error.hpp"
#include "dancekit/kernels.hpp"
#include "dancekit/rng.hpp"

namespace dk::recal {

namespace {

constexpr double kLayerNormEps = 1e-5;

void check_finite(std::span<const double> values, const char* what) {
  for (double v : values) {
    if (!std::isfinite(v)) {
      throw_error(ErrorKind::Numeric,
                  std::string(what) + " contains a non-finite value");
    }
  }
}

// Forward pass through one conv layer. in has in_channels * 126 entries,
// out gets out_channels * 126. pre_activation, when non-null, receives the
// conv+bias values (needed for the tanh Jacobian).
void conv_forward(const ConvLayer& layer, const std::vector<double>& in,
                  std::vector<double>& out,
                  std::vector<double>* pre_activation) {
  const auto& k = kernels::ops();
  const int L = kPoolLen;
  const int pad = (layer.kernel_size - 1) / 2;
  out.assign(static_cast<std::size_t>(layer.out_channels) * L, 0.0);

  for (int oc = 0; oc < layer.out_channels; ++oc) {
    double* y = out.data() + static_cast<std::size_t>(oc) * L;
    std::fill(y, y + L, layer.bias[oc]);
    for (int ic = 0; ic < layer.in_channels; ++ic) {
      const double* x = in.data() + static_cast<std::size_t>(ic) * L;
      for (int kk = 0; kk < layer.kernel_size; ++kk) {
        const double w =
            layer.weights[(static_cast<std::size_t>(oc) * layer.in_channels +
                           ic) *
                              layer.kernel_size +
                          kk];
        // y[t] += w * x[t + kk - pad] over valid t.
        const int shift = kk - pad;
        const int t0 = std::max(0, -shift);
        const int t1 = std::min(L, L - shift);
        if (t1 > t0) {
          k.axpy(static_cast<std::size_t>(t1 - t0), w, x + t0 + shift, y + t0);
        }
      }
    }
  }
  if (pre_activation != nullptr) {
    *pre_activation = out;
  }
  if (layer.activation == Activation::Tanh) {
    for (double& v : out) {
      v = std::tanh(v);
    }
  }
  if (layer.batchnorm.has_value()) {
    const BatchNorm& bn = *layer.batchnorm;
    for (int oc = 0; oc < layer.out_channels; ++oc) {
      const double a =
          bn.gamma[oc] / std::sqrt(bn.running_var[oc] + bn.epsilon);
      const double b = bn.beta[oc] - bn.running_mean[oc] * a;
      double* y = out.data() + static_cast<std::size_t>(oc) * L;
      k.scale_shift(static_cast<std::size_t>(L), a, b, y, y);
    }
  }
}

struct LayerNormState {
  double mean = 0.0;
  double inv_std = 0.0;
  std::vector<double> normalized;  // x-hat, before the affine terms
};

std::vector<double> layer_norm_forward(const PoolingParams& params,
                                       std::span<const double> input,
                                       LayerNormState* state) {
  const std::size_t n = input.size();
  double mean = 0.0;
  for (double v : input) {
    mean += v;
  }
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double v : input) {
    const double d = v - mean;
    var += d * d;
  }
  var /= static_cast<double>(n);
  const double inv_std = 1.0 / std::sqrt(var + kLayerNormEps);

  std::vector<double> out(n);
  kernels::ops().norm_affine(n, mean, inv_std, params.ln_gamma.data(),
                             params.ln_beta.data(), input.data(), out.data());
  if (state != nullptr) {
    state->mean = mean;
    state->inv_std = inv_std;
    state->normalized.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      state->normalized[i] = (input[i] - mean) * inv_std;
    }
  }
  return out;
}

}  // namespace

void PoolingParams::validate() const {
  if (conv_layers.empty()) {
    throw_error(ErrorKind::Config, "pooling block needs at least one layer");
  }
  if (conv_layers.front().in_channels != kPoolRows) {
    throw_error(ErrorKind::Config, "first layer must take 2 input channels");
  }
  if (conv_layers.back().out_channels != 1) {
    throw_error(ErrorKind::Config, "last layer must emit 1 output channel");
  }
  for (std::size_t i = 0; i < conv_layers.size(); ++i) {
    const ConvLayer& l = conv_layers[i];
    const std::string where = "conv layer " + std::to_string(i);
    if (i > 0 && conv_layers[i - 1].out_channels != l.in_channels) {
      throw_error(ErrorKind::Config,
                  where + ": in_channels does not match previous layer");
    }
    if (l.in_channels < 1 || l.out_channels < 1) {
      throw_error(ErrorKind::Config, where + ": channel counts must be >= 1");
    }
    if (l.kernel_size < 1 || l.kernel_size % 2 == 0) {
      throw_error(ErrorKind::Config, where + ": kernel_size must be odd");
    }
    const std::size_t want_w = static_cast<std::size_t>(l.out_channels) *
                               l.in_channels * l.kernel_size;
    if (l.weights.size() != want_w) {
      throw_error(ErrorKind::Config, where + ": weights size mismatch");
    }
    if (l.bias.size() != static_cast<std::size_t>(l.out_channels)) {
      throw_error(ErrorKind::Config, where + ": bias size mismatch");
    }
    for (double w : l.weights) {
      if (!std::isfinite(w)) {
        throw_error(ErrorKind::Schema, where + ": non-finite weight");
      }
    }
    for (double b : l.bias) {
      if (!std::isfinite(b)) {
        throw_error(ErrorKind::Schema, where + ": non-finite bias");
      }
    }
    if (l.batchnorm.has_value()) {
      const BatchNorm& bn = *l.batchnorm;
      const std::size_t c = static_cast<std::size_t>(l.out_channels);
      if (bn.running_mean.size() != c || bn.running_var.size() != c ||
          bn.gamma.size() != c || bn.beta.size() != c) {
        throw_error(ErrorKind::Config, where + ": batchnorm size mismatch");
      }
      for (double v : bn.running_var) {
        if (!(v > 0.0)) {
          throw_error(ErrorKind::Config,
                      where + ": batchnorm running_var must be positive");
        }
      }
      for (const auto* vec :
           {&bn.running_mean, &bn.running_var, &bn.gamma, &bn.beta}) {
        for (double v : *vec) {
          if (!std::isfinite(v)) {
            throw_error(ErrorKind::Schema,
                        where + ": non-finite batchnorm parameter");
          }
        }
      }
    }
  }
  if (normalize) {
    if (ln_gamma.size() != static_cast<std::size_t>(kPoolInputSize) ||
        ln_beta.size() != static_cast<std::size_t>(kPoolInputSize)) {
      throw_error(ErrorKind::Config,
                  "layer norm affine terms must have 252 entries");
    }
    for (const auto* vec : {&ln_gamma, &ln_beta}) {
      for (double v : *vec) {
        if (!std::isfinite(v)) {
          throw_error(ErrorKind::Schema, "non-finite layer norm parameter");
        }
      }
    }
  }
}

PoolingParams passthrough_params() {
  PoolingParams p;
  p.conv_layers.push_back(ConvLayer{
      .in_channels = 2,
      .out_channels = 1,
      .kernel_size = 1,
      .weights = {1.0, 0.0},
      .bias = {0.0},
      .activation = Activation::Identity,
      .batchnorm = std::nullopt,
  });
  return p;
}

PoolingParams ema_params(double alpha) {
  if (!(alpha > 0.0) || alpha > 1.0) {
    throw_error(ErrorKind::Config, "ema alpha must lie in (0, 1]");
  }
  PoolingParams p;
  p.conv_layers.push_back(ConvLayer{
      .in_channels = 2,
      .out_channels = 1,
      .kernel_size = 1,
      .weights = {alpha, 1.0 - alpha},
      .bias = {0.0},
      .activation = Activation::Identity,
      .batchnorm = std::nullopt,
  });
  return p;
}

std::vector<LayerSpec> default_arch() {
  return {{2, 8, 3}, {8, 8, 3}, {8, 1, 3}};
}

PoolingParams init_params(std::uint64_t seed,
                          const std::vector<LayerSpec>& arch) {
  if (arch.empty() || arch.front().in_channels != 2 ||
      arch.back().out_channels != 1) {
    throw_error(ErrorKind::Config,
                "architecture must map 2 input channels to 1 output channel");
  }
  const rng::CounterRng gen(seed);
  PoolingParams p;
  p.normalize = true;
  p.ln_gamma.assign(kPoolInputSize, 1.0);
  p.ln_beta.assign(kPoolInputSize, 0.0);
  for (std::size_t li = 0; li < arch.size(); ++li) {
    const LayerSpec& spec = arch[li];
    if (li > 0 && arch[li - 1].out_channels != spec.in_channels) {
      throw_error(ErrorKind::Config,
                  "architecture layer " + std::to_string(li) +
                      ": channel mismatch with previous layer");
    }
    if (spec.kernel_size < 1 || spec.kernel_size % 2 == 0) {
      throw_error(ErrorKind::Config, "architecture layer " +
                                         std::to_string(li) +
                                         ": kernel_size must be odd");
    }
    ConvLayer layer;
    layer.in_channels = spec.in_channels;
    layer.out_channels = spec.out_channels;
    layer.kernel_size = spec.kernel_size;
    const double bound =
        1.0 / std::sqrt(static_cast<double>(spec.in_channels) *
                        spec.kernel_size);
    const std::size_t nw = static_cast<std::size_t>(spec.out_channels) *
                           spec.in_channels * spec.kernel_size;
    layer.weights.resize(nw);
    for (std::size_t w = 0; w < nw; ++w) {
      layer.weights[w] = gen.uniform(2 * li, w, -bound, bound);
    }
    layer.bias.resize(spec.out_channels);
    for (int b = 0; b < spec.out_channels; ++b) {
      layer.bias[b] =
          gen.uniform(2 * li + 1, static_cast<std::uint64_t>(b), -bound, bound);
    }
    layer.activation = Activation::Tanh;
    BatchNorm bn;
    bn.running_mean.assign(spec.out_channels, 0.0);
    bn.running_var.assign(spec.out_channels, 1.0);
    bn.gamma.assign(spec.out_channels, 1.0);
    bn.beta.assign(spec.out_channels, 0.0);
    layer.batchnorm = bn;
    p.conv_layers.push_back(std::move(layer));
  }
  p.validate();
  return p;
}

std::array<double, kPoolLen> add_noise(std::span<const double, kPoolLen> v,
                                       const NoiseConfig& cfg,
                                       std::uint64_t stream_index) {
  if (cfg.threshold < 0.0) {
    throw_error(ErrorKind::Config, "noise threshold must be nonnegative");
  }
  std::array<double, kPoolLen> out;
  std::copy(v.begin(), v.end(), out.begin());
  if (!cfg.enabled || cfg.threshold == 0.0) {
    return out;
  }
  const rng::CounterRng gen(cfg.seed);
  for (int c = 0; c < kPoolLen; ++c) {
    out[c] += cfg.threshold * gen.normal(stream_index, c);
  }
  return out;
}

std::array<double, kPoolLen> pooling_block(
    std::span<const double, kPoolInputSize> pair, const PoolingParams& params) {
  params.validate();
  check_finite(pair, "pooling input");

  std::vector<double> current;
  if (params.normalize) {
    current = layer_norm_forward(params, pair, nullptr);
  } else {
    current.assign(pair.begin(), pair.end());
  }
  std::vector<double> next;
  for (const ConvLayer& layer : params.conv_layers) {
    conv_forward(layer, current, next, nullptr);
    current.swap(next);
  }
  check_finite(current, "pooling output");

  std::array<double, kPoolLen> out;
  std::copy_n(current.begin(), kPoolLen, out.begin());
  return out;
}

motion::Primitive recalibrate_step(const motion::Primitive& gd_i,
                                   const motion::Primitive& grd_prev,
                                   const RecalConfig& cfg,
                                   std::uint64_t step_index) {
  check_finite(gd_i.channels, "current primitive");
  check_finite(grd_prev.channels, "previous primitive");

  const auto noised =
      add_noise(grd_prev.joint_rotations(), cfg.noise, step_index);
  std::array<double, kPoolInputSize> pair;
  std::copy(gd_i.joint_rotations().begin(), gd_i.joint_rotations().end(),
            pair.begin());
  std::copy(noised.begin(), noised.end(), pair.begin() + kPoolLen);

  motion::Primitive out = gd_i;  // foot/root channels pass through
  const auto pooled = pooling_block(pair, cfg.params);
  std::copy(pooled.begin(), pooled.end(), out.joint_rotations().begin());
  return out;
}

motion::PrimitiveSequence recalibrate_sequence(
    const motion::PrimitiveSequence& seq, const RecalConfig& cfg) {
  if (seq.batch < 1 || seq.length < 1) {
    throw_error(ErrorKind::InsufficientData,
                "sequence must have batch >= 1 and length >= 1");
  }
  cfg.params.validate();

  motion::PrimitiveSequence out = seq;
  for (int b = 0; b < seq.batch; ++b) {
    try {
      // GRD_0: pool the pair (GD_0, GD_0); no noise at step zero.
      {
        const motion::Primitive& first = seq.at(b, 0);
        std::array<double, kPoolInputSize> pair;
        const auto joints = first.joint_rotations();
        std::copy(joints.begin(), joints.end(), pair.begin());
        std::copy(joints.begin(), joints.end(), pair.begin() + kPoolLen);
        const auto pooled = pooling_block(pair, cfg.params);
        std::copy(pooled.begin(), pooled.end(),
                  out.at(b, 0).joint_rotations().begin());
      }
      for (int i = 1; i < seq.length; ++i) {
        out.at(b, i) = recalibrate_step(seq.at(b, i), out.at(b, i - 1), cfg,
                                        static_cast<std::uint64_t>(i));
      }
    } catch (const Error& e) {
      throw Error(e.kind(), "batch " + std::to_string(b) + ": " + e.what());
    }
  }
  return out;
}

Eigen::MatrixXd pooling_jacobian_analytic(
    std::span<const double, kPoolInputSize> pair, const PoolingParams& params) {
  params.validate();
  check_finite(pair, "pooling input");
  const int N = kPoolInputSize;
  const int L = kPoolLen;

  Eigen::MatrixXd jac = Eigen::MatrixXd::Identity(N, N);
  std::vector<double> current;

  if (params.normalize) {
    LayerNormState state;
    current = layer_norm_forward(params, pair, &state);
    // d y_i / d x_j = g_i * [ (delta_ij - 1/N) / s - xhat_i xhat_j / (N s) ]
    Eigen::MatrixXd ln(N, N);
    const double inv_n = 1.0 / static_cast<double>(N);
    for (int i = 0; i < N; ++i) {
      for (int j = 0; j < N; ++j) {
        double v = -inv_n * state.inv_std -
                   state.normalized[i] * state.normalized[j] * inv_n *
                       state.inv_std;
        if (i == j) {
          v += state.inv_std;
        }
        ln(i, j) = params.ln_gamma[i] * v;
      }
    }
    jac = ln;
  } else {
    current.assign(pair.begin(), pair.end());
  }

  std::vector<double> next;
  std::vector<double> pre_activation;
  for (const ConvLayer& layer : params.conv_layers) {
    const int pad = (layer.kernel_size - 1) / 2;
    Eigen::MatrixXd conv =
        Eigen::MatrixXd::Zero(layer.out_channels * L, layer.in_channels * L);
    for (int oc = 0; oc < layer.out_channels; ++oc) {
      for (int ic = 0; ic < layer.in_channels; ++ic) {
        for (int kk = 0; kk < layer.kernel_size; ++kk) {
          const double w =
              layer.weights[(static_cast<std::size_t>(oc) * layer.in_channels +
                             ic) *
                                layer.kernel_size +
                            kk];
          for (int t = 0; t < L; ++t) {
            const int u = t + kk - pad;
            if (u >= 0 && u < L) {
              conv(oc * L + t, ic * L + u) += w;
            }
          }
        }
      }
    }
    jac = conv * jac;

    conv_forward(layer, current, next, &pre_activation);
    if (layer.activation == Activation::Tanh) {
      for (int r = 0; r < layer.out_channels * L; ++r) {
        const double th = std::tanh(pre_activation[r]);
        jac.row(r) *= 1.0 - th * th;
      }
    }
    if (layer.batchnorm.has_value()) {
      const BatchNorm& bn = *layer.batchnorm;
      for (int oc = 0; oc < layer.out_channels; ++oc) {
        const double a =
            bn.gamma[oc] / std::sqrt(bn.running_var[oc] + bn.epsilon);
        jac.middleRows(oc * L, L) *= a;
      }
    }
    current.swap(next);
  }
  return jac;  // 126 x 252
}

Eigen::MatrixXd pooling_jacobian_fd(std::span<const double, kPoolInputSize> pair,
                                    const PoolingParams& params, double eps) {
  if (!(eps > 0.0)) {
    throw_error(ErrorKind::Config, "fd eps must be positive");
  }
  Eigen::MatrixXd jac(kPoolLen, kPoolInputSize);
  std::array<double, kPoolInputSize> probe;
  std::copy(pair.begin(), pair.end(), probe.begin());
  for (int c = 0; c < kPoolInputSize; ++c) {
    const double saved = probe[c];
    probe[c] = saved + eps;
    const auto plus = pooling_block(probe, params);
    probe[c] = saved - eps;
    const auto minus = pooling_block(probe, params);
    probe[c] = saved;
    for (int r = 0; r < kPoolLen; ++r) {
      jac(r, c) = (plus[r] - minus[r]) / (2.0 * eps);
    }
  }
  return jac;
}

}  // namespace dk::recal
