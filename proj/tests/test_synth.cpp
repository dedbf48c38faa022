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
#include <numbers>

#include "dancekit/error.hpp"
#include "dancekit/motion.hpp"
#include "dancekit/synth.hpp"

using namespace dk;

TEST_CASE("synthesis is deterministic in the seed") {
  for (auto kind : {synth::Kind::IidGaussian, synth::Kind::RandomWalk,
                    synth::Kind::Sinusoid}) {
    const auto a = synth::synthesize(kind, 2, 6, 17);
    const auto b = synth::synthesize(kind, 2, 6, 17);
    REQUIRE(a.data.size() == b.data.size());
    for (std::size_t i = 0; i < a.data.size(); ++i) {
      CHECK(a.data[i].channels == b.data[i].channels);
    }
    const auto c = synth::synthesize(kind, 2, 6, 18);
    if (kind != synth::Kind::Sinusoid) {
      CHECK(a.data[0].channels != c.data[0].channels);
    }
  }
}

TEST_CASE("synthesized sequences pass validation") {
  for (auto kind : {synth::Kind::IidGaussian, synth::Kind::RandomWalk,
                    synth::Kind::Sinusoid}) {
    const auto seq = synth::synthesize(kind, 3, 8, 5);
    CHECK(motion::validate(seq).empty());
    CHECK(seq.batch == 3);
    CHECK(seq.length == 8);
    CHECK(seq.fps == 30.0);
  }
}

TEST_CASE("sinusoid matches its closed-form angles") {
  const auto seq = synth::synthesize(synth::Kind::Sinusoid, 2, 10, 0);
  for (int b = 0; b < 2; ++b) {
    for (int i = 0; i < 10; ++i) {
      const auto& p = seq.at(b, i);
      CHECK(p.root_translation()[0] ==
            doctest::Approx(0.5 * std::sin(2 * std::numbers::pi * i / 20.0))
                .epsilon(1e-12));
      for (int k = 0; k < motion::layout::kNonRootJoints; ++k) {
        const double a = synth::sinusoid_angle(k, i, b);
        // Rotation about x: columns (1,0,0) and (0,cos a,sin a).
        const auto r = p.joint_rot6d(k);
        CHECK(r[0] == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(std::abs(r[1]) <= 1e-12);
        CHECK(std::abs(r[2]) <= 1e-12);
        CHECK(std::abs(r[3]) <= 1e-12);
        CHECK(std::abs(r[4] - std::cos(a)) <= 1e-12);
        CHECK(std::abs(r[5] - std::sin(a)) <= 1e-12);
      }
    }
  }
}

TEST_CASE("kind names round-trip") {
  for (auto kind : {synth::Kind::IidGaussian, synth::Kind::RandomWalk,
                    synth::Kind::Sinusoid}) {
    CHECK(synth::kind_from_string(synth::to_string(kind)) == kind);
  }
  CHECK_THROWS_AS(synth::kind_from_string("brownian"), Error);
}

TEST_CASE("gaussian channel sequence has unit-scale joint channels") {
  const auto seq = synth::gaussian_channel_sequence(2, 50, 3);
  double sum = 0.0;
  double sum_sq = 0.0;
  int n = 0;
  for (const auto& p : seq.data) {
    CHECK(p.foot()[0] == 0.0);
    CHECK(p.root_translation()[0] == 0.0);
    CHECK(p.root_rotation()[0] == 1.0);
    for (double v : p.joint_rotations()) {
      sum += v;
      sum_sq += v * v;
      ++n;
    }
  }
  const double mean = sum / n;
  CHECK(std::abs(mean) < 0.05);
  CHECK(std::abs(std::sqrt(sum_sq / n - mean * mean) - 1.0) < 0.05);
}

TEST_CASE("non-positive shapes are config errors") {
  CHECK_THROWS_AS(synth::synthesize(synth::Kind::Sinusoid, 0, 5, 1), Error);
  CHECK_THROWS_AS(synth::synthesize(synth::Kind::Sinusoid, 1, 0, 1), Error);
}
