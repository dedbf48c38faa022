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

#include <doctest.h>

#include <cmath>

#include "dancekit/error.hpp"
#include "dancekit/recal.hpp"
#include "dancekit/rng.hpp"
#include "dancekit/synth.hpp"

using namespace dk;
using recal::kPoolInputSize;
using recal::kPoolLen;

namespace {

std::array<double, kPoolInputSize> seeded_pair(std::uint64_t seed) {
  const rng::CounterRng gen(seed);
  std::array<double, kPoolInputSize> pair;
  for (int c = 0; c < kPoolInputSize; ++c) {
    pair[c] = gen.normal(0, c);
  }
  return pair;
}

double mean_successive_diff(const motion::PrimitiveSequence& seq) {
  double total = 0.0;
  int count = 0;
  for (int b = 0; b < seq.batch; ++b) {
    for (int i = 0; i + 1 < seq.length; ++i) {
      double sq = 0.0;
      const auto cur = seq.at(b, i).joint_rotations();
      const auto next = seq.at(b, i + 1).joint_rotations();
      for (int c = 0; c < kPoolLen; ++c) {
        const double d = next[c] - cur[c];
        sq += d * d;
      }
      total += std::sqrt(sq);
      ++count;
    }
  }
  return total / count;
}

}  // namespace

TEST_CASE("add_noise is the identity at threshold 0 or when disabled") {
  std::array<double, kPoolLen> v;
  v.fill(0.25);
  const auto a = recal::add_noise(v, {0.0, 7, true}, 0);
  CHECK(std::equal(a.begin(), a.end(), v.begin()));
  const auto b = recal::add_noise(v, {1.0, 7, false}, 0);
  CHECK(std::equal(b.begin(), b.end(), v.begin()));
}

TEST_CASE("add_noise empirical std tracks the threshold") {
  std::array<double, kPoolLen> zero{};
  const recal::NoiseConfig cfg{0.5, 7, true};
  double sum_sq = 0.0;
  int n = 0;
  // 10^5 draws across streams.
  for (int stream = 0; stream < 800; ++stream) {
    const auto out = recal::add_noise(zero, cfg, stream);
    for (double e : out) {
      sum_sq += e * e;
      ++n;
    }
  }
  const double std_hat = std::sqrt(sum_sq / n);
  CHECK(std::abs(std_hat - cfg.threshold) < 0.02 * cfg.threshold);
}

TEST_CASE("doubling the threshold doubles the noise exactly") {
  std::array<double, kPoolLen> zero{};
  const auto once = recal::add_noise(zero, {0.3, 9, true}, 5);
  const auto twice = recal::add_noise(zero, {0.6, 9, true}, 5);
  for (int c = 0; c < kPoolLen; ++c) {
    CHECK(twice[c] == 2.0 * once[c]);
  }
}

TEST_CASE("passthrough pooling returns row 0 exactly") {
  const auto pair = seeded_pair(3);
  const auto out = recal::pooling_block(pair, recal::passthrough_params());
  for (int c = 0; c < kPoolLen; ++c) {
    CHECK(out[c] == pair[c]);
  }
}

TEST_CASE("ema pooling is the stated linear combination") {
  std::array<double, kPoolInputSize> pair;
  std::fill(pair.begin(), pair.begin() + kPoolLen, 1.0);
  std::fill(pair.begin() + kPoolLen, pair.end(), 0.0);
  const auto out = recal::pooling_block(pair, recal::ema_params(0.5));
  for (int c = 0; c < kPoolLen; ++c) {
    CHECK(out[c] == 0.5);
  }
}

TEST_CASE("layer norm zeroes a constant input") {
  recal::PoolingParams params = recal::passthrough_params();
  params.normalize = true;
  params.ln_gamma.assign(kPoolInputSize, 1.0);
  params.ln_beta.assign(kPoolInputSize, 0.0);
  std::array<double, kPoolInputSize> pair;
  pair.fill(4.2);
  const auto out = recal::pooling_block(pair, params);
  // The mean of 252 equal values carries summation rounding, so the
  // centered input is ~1e-13, not exactly zero.
  for (int c = 0; c < kPoolLen; ++c) {
    CHECK(std::abs(out[c]) < 1e-9);
  }
}

TEST_CASE("channel-incompatible params are a configuration error") {
  recal::PoolingParams params = recal::passthrough_params();
  params.conv_layers[0].in_channels = 3;
  CHECK_THROWS_AS(recal::pooling_block(seeded_pair(1), params), Error);

  recal::PoolingParams even = recal::passthrough_params();
  even.conv_layers[0].kernel_size = 2;
  even.conv_layers[0].weights = {1, 0, 0, 0};
  CHECK_THROWS_AS(even.validate(), Error);
}

TEST_CASE("recalibrate_step keeps the 13 non-joint channels") {
  const auto seq = synth::synthesize(synth::Kind::IidGaussian, 1, 2, 77);
  const recal::RecalConfig cfg{recal::init_params(5, recal::default_arch()),
                               {1.0, 5, true}};
  const auto out = recal::recalibrate_step(seq.at(0, 1), seq.at(0, 0), cfg, 1);
  for (int c = 0; c < motion::layout::kJointRotationOffset; ++c) {
    CHECK(out.channels[c] == seq.at(0, 1).channels[c]);
  }
}

TEST_CASE("recalibrate_step passthrough with zero noise is the identity") {
  const auto seq = synth::synthesize(synth::Kind::IidGaussian, 1, 2, 78);
  const recal::RecalConfig cfg{recal::passthrough_params(), {0.0, 0, true}};
  const auto out = recal::recalibrate_step(seq.at(0, 1), seq.at(0, 0), cfg, 1);
  CHECK(out == seq.at(0, 1));
}

TEST_CASE("ema step blends joint rotations") {
  motion::Primitive gd;
  motion::Primitive prev;
  std::fill(gd.joint_rotations().begin(), gd.joint_rotations().end(), 1.0);
  const recal::RecalConfig cfg{recal::ema_params(0.5), {0.0, 0, true}};
  const auto out = recal::recalibrate_step(gd, prev, cfg, 1);
  for (double v : out.joint_rotations()) {
    CHECK(v == 0.5);
  }
}

TEST_CASE("recalibrate_sequence equals the explicit fold") {
  const auto seq = synth::synthesize(synth::Kind::IidGaussian, 2, 13, 1001);
  const recal::RecalConfig cfg{recal::init_params(42, recal::default_arch()),
                               {0.5, 42, true}};
  const auto out = recal::recalibrate_sequence(seq, cfg);

  for (int b = 0; b < seq.batch; ++b) {
    // Fold oracle: GRD_0 from the (GD_0, GD_0) pair, then step by step.
    motion::Primitive state = seq.at(b, 0);
    {
      std::array<double, kPoolInputSize> pair;
      const auto joints = seq.at(b, 0).joint_rotations();
      std::copy(joints.begin(), joints.end(), pair.begin());
      std::copy(joints.begin(), joints.end(), pair.begin() + kPoolLen);
      const auto pooled = recal::pooling_block(pair, cfg.params);
      std::copy(pooled.begin(), pooled.end(),
                state.joint_rotations().begin());
    }
    for (int c = 0; c < motion::layout::kTotal; ++c) {
      CHECK(std::abs(out.at(b, 0).channels[c] - state.channels[c]) <= 1e-12);
    }
    for (int i = 1; i < seq.length; ++i) {
      state = recal::recalibrate_step(seq.at(b, i), state, cfg, i);
      for (int c = 0; c < motion::layout::kTotal; ++c) {
        CHECK(std::abs(out.at(b, i).channels[c] - state.channels[c]) <= 1e-12);
      }
    }
  }
}

TEST_CASE("recalibrate_sequence is deterministic including noise") {
  const auto seq = synth::synthesize(synth::Kind::RandomWalk, 2, 7, 5);
  const recal::RecalConfig cfg{recal::init_params(3, recal::default_arch()),
                               {0.25, 3, true}};
  const auto a = recal::recalibrate_sequence(seq, cfg);
  const auto b = recal::recalibrate_sequence(seq, cfg);
  CHECK(a == b);
}

TEST_CASE("n=1 passthrough sequence is unchanged") {
  const auto seq = synth::synthesize(synth::Kind::IidGaussian, 1, 1, 6);
  const recal::RecalConfig cfg{recal::passthrough_params(), {0.0, 0, true}};
  CHECK(recal::recalibrate_sequence(seq, cfg) == seq);
}

TEST_CASE("ema preset matches the scalar recursion per channel") {
  const double alpha = 0.5;
  const auto seq = synth::gaussian_channel_sequence(1, 13, 321);
  const recal::RecalConfig cfg{recal::ema_params(alpha), {0.0, 0, true}};
  const auto out = recal::recalibrate_sequence(seq, cfg);

  for (int c = 0; c < kPoolLen; ++c) {
    double y = seq.at(0, 0).joint_rotations()[c];
    CHECK(std::abs(out.at(0, 0).joint_rotations()[c] - y) <= 1e-9);
    for (int i = 1; i < seq.length; ++i) {
      y = alpha * seq.at(0, i).joint_rotations()[c] + (1.0 - alpha) * y;
      CHECK(std::abs(out.at(0, i).joint_rotations()[c] - y) <= 1e-9);
    }
  }
}

TEST_CASE("ema smooths iid Gaussian joint channels") {
  const auto seq = synth::gaussian_channel_sequence(1, 13, 1234);
  const recal::RecalConfig cfg{recal::ema_params(0.5), {0.0, 0, true}};
  const auto out = recal::recalibrate_sequence(seq, cfg);
  CHECK(mean_successive_diff(out) / mean_successive_diff(seq) < 0.9);
}

TEST_CASE("jacobian of linear presets is exact") {
  const auto pair = seeded_pair(8);
  const auto jac_pass =
      recal::pooling_jacobian_analytic(pair, recal::passthrough_params());
  for (int r = 0; r < kPoolLen; ++r) {
    for (int c = 0; c < kPoolInputSize; ++c) {
      CHECK(jac_pass(r, c) == (c == r ? 1.0 : 0.0));
    }
  }
  const auto jac_ema =
      recal::pooling_jacobian_analytic(pair, recal::ema_params(0.5));
  for (int r = 0; r < kPoolLen; ++r) {
    for (int c = 0; c < kPoolInputSize; ++c) {
      const bool diag = c == r || c == r + kPoolLen;
      CHECK(jac_ema(r, c) == (diag ? 0.5 : 0.0));
    }
  }
  // Central differences are exact for linear maps.
  const auto fd = recal::pooling_jacobian_fd(pair, recal::ema_params(0.5));
  CHECK((jac_ema - fd).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("analytic jacobian matches central differences on learned params") {
  for (std::uint64_t seed : {1ull, 42ull, 99ull}) {
    const auto params = recal::init_params(seed, recal::default_arch());
    const auto pair = seeded_pair(seed + 1000);
    const auto analytic = recal::pooling_jacobian_analytic(pair, params);
    const auto fd = recal::pooling_jacobian_fd(pair, params, 1e-4);
    const double scale = std::max(analytic.cwiseAbs().maxCoeff(), 1e-12);
    CHECK((analytic - fd).cwiseAbs().maxCoeff() / scale <= 1e-5);
  }
}

TEST_CASE("fd deviation shrinks as eps is halved") {
  const auto params = recal::init_params(42, recal::default_arch());
  const auto pair = seeded_pair(4242);
  const auto analytic = recal::pooling_jacobian_analytic(pair, params);
  const double err_big =
      (analytic - recal::pooling_jacobian_fd(pair, params, 2e-3))
          .cwiseAbs()
          .maxCoeff();
  const double err_small =
      (analytic - recal::pooling_jacobian_fd(pair, params, 1e-3))
          .cwiseAbs()
          .maxCoeff();
  CHECK(err_small < err_big);
}

TEST_CASE("init_params is deterministic and validates the arch") {
  const auto a = recal::init_params(7, recal::default_arch());
  const auto b = recal::init_params(7, recal::default_arch());
  CHECK(a.conv_layers.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(a.conv_layers[i].weights == b.conv_layers[i].weights);
    CHECK(a.conv_layers[i].bias == b.conv_layers[i].bias);
    CHECK(a.conv_layers[i].activation == recal::Activation::Tanh);
    CHECK(a.conv_layers[i].batchnorm.has_value());
  }
  CHECK(a.normalize);

  CHECK_THROWS_AS(recal::init_params(1, {{2, 8, 3}, {4, 1, 3}}), Error);
  CHECK_THROWS_AS(recal::init_params(1, {{2, 1, 4}}), Error);
}
