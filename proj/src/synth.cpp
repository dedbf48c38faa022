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

#include "dancekit/synth.hpp"

#include <cmath>
#include <numbers>

#include "dancekit/error.hpp"
#include "dancekit/rng.hpp"

namespace dk::synth {

namespace {

using motion::Mat3;
using motion::Vec3;

// Rodrigues' formula for a unit axis.
Mat3 axis_angle_to_matrix(const Vec3& axis, double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  const double t = 1.0 - c;
  const Vec3& u = axis;
  Mat3 m;
  m.cols[0] = {c + u.x * u.x * t, u.y * u.x * t + u.z * s,
               u.z * u.x * t - u.y * s};
  m.cols[1] = {u.x * u.y * t - u.z * s, c + u.y * u.y * t,
               u.z * u.y * t + u.x * s};
  m.cols[2] = {u.x * u.z * t + u.y * s, u.y * u.z * t - u.x * s,
               c + u.z * u.z * t};
  return m;
}

// Draw indices within a frame's stream: 16 slots per joint block, then the
// root translation and foot channels.
constexpr std::uint64_t kJointSlots = 16;
constexpr std::uint64_t kRootTransBase = kJointSlots * 22;
constexpr std::uint64_t kFootBase = kRootTransBase + 8;

Mat3 random_rotation(const rng::CounterRng& gen, std::uint64_t stream,
                     std::uint64_t base) {
  Vec3 axis{gen.normal(stream, base), gen.normal(stream, base + 1),
            gen.normal(stream, base + 2)};
  double n = axis.norm();
  if (n < 1e-12) {
    axis = {1.0, 0.0, 0.0};
    n = 1.0;
  }
  const double angle =
      gen.uniform(stream, base + 3, -std::numbers::pi, std::numbers::pi);
  return axis_angle_to_matrix(axis * (1.0 / n), angle);
}

void encode_rotation(const Mat3& m, std::span<double, 6> out) {
  const auto r6d = motion::matrix_to_rot6d(m);
  std::copy(r6d.begin(), r6d.end(), out.begin());
}

}  // namespace

Kind kind_from_string(const std::string& s) {
  if (s == "iid-gaussian") return Kind::IidGaussian;
  if (s == "random-walk") return Kind::RandomWalk;
  if (s == "sinusoid") return Kind::Sinusoid;
  throw_error(ErrorKind::Usage, "unknown synth kind '" + s + "'");
}

std::string to_string(Kind kind) {
  switch (kind) {
    case Kind::IidGaussian:
      return "iid-gaussian";
    case Kind::RandomWalk:
      return "random-walk";
    case Kind::Sinusoid:
      return "sinusoid";
  }
  return "iid-gaussian";
}

double sinusoid_angle(int joint_k, int frame_i, int batch_b) {
  const double phase = joint_k * std::numbers::pi / 8.0 +
                       batch_b * std::numbers::pi / 4.0;
  return 0.5 * std::sin(2.0 * std::numbers::pi * frame_i / 20.0 + phase);
}

motion::PrimitiveSequence synthesize(Kind kind, int batch, int length,
                                     std::uint64_t seed, double fps) {
  if (batch < 1 || length < 1) {
    throw_error(ErrorKind::Usage, "batch and length must be >= 1");
  }
  const rng::CounterRng gen(seed);
  motion::PrimitiveSequence seq;
  seq.batch = batch;
  seq.length = length;
  seq.fps = fps;
  seq.kind = motion::SequenceKind::Coarse;
  seq.data.resize(static_cast<std::size_t>(batch) * length);

  for (int b = 0; b < batch; ++b) {
    Vec3 walk_pos{0, 0, 0};
    std::vector<Mat3> walk_rot(motion::layout::kJointCount, Mat3::identity());
    for (int i = 0; i < length; ++i) {
      motion::Primitive& p = seq.at(b, i);
      const std::uint64_t stream =
          static_cast<std::uint64_t>(b) * length + i;
      switch (kind) {
        case Kind::IidGaussian: {
          encode_rotation(random_rotation(gen, stream, 0), p.root_rotation());
          for (int k = 0; k < motion::layout::kNonRootJoints; ++k) {
            encode_rotation(
                random_rotation(gen, stream, kJointSlots * (k + 1)),
                p.joint_rot6d(k));
          }
          for (int c = 0; c < 3; ++c) {
            p.root_translation()[c] = gen.normal(stream, kRootTransBase + c);
          }
          for (int c = 0; c < 4; ++c) {
            p.foot()[c] = gen.normal(stream, kFootBase + c);
          }
          break;
        }
        case Kind::RandomWalk: {
          for (int j = 0; j < motion::layout::kJointCount; ++j) {
            const Mat3 step =
                axis_angle_to_matrix(
                    [&] {
                      Vec3 axis{gen.normal(stream, kJointSlots * j),
                                gen.normal(stream, kJointSlots * j + 1),
                                gen.normal(stream, kJointSlots * j + 2)};
                      const double n = axis.norm();
                      return n < 1e-12 ? Vec3{1, 0, 0} : axis * (1.0 / n);
                    }(),
                    0.1 * gen.normal(stream, kJointSlots * j + 3));
            walk_rot[j] = walk_rot[j] * step;
          }
          encode_rotation(walk_rot[0], p.root_rotation());
          for (int k = 0; k < motion::layout::kNonRootJoints; ++k) {
            encode_rotation(walk_rot[k + 1], p.joint_rot6d(k));
          }
          for (int c = 0; c < 3; ++c) {
            double& coord = c == 0 ? walk_pos.x : (c == 1 ? walk_pos.y
                                                          : walk_pos.z);
            coord += 0.1 * gen.normal(stream, kRootTransBase + c);
            p.root_translation()[c] = coord;
          }
          for (int c = 0; c < 4; ++c) {
            p.foot()[c] = gen.uniform(stream, kFootBase + c);
          }
          break;
        }
        case Kind::Sinusoid: {
          encode_rotation(Mat3::identity(), p.root_rotation());
          for (int k = 0; k < motion::layout::kNonRootJoints; ++k) {
            const double angle = sinusoid_angle(k, i, b);
            encode_rotation(axis_angle_to_matrix({1, 0, 0}, angle),
                            p.joint_rot6d(k));
          }
          p.root_translation()[0] =
              0.5 * std::sin(2.0 * std::numbers::pi * i / 20.0);
          break;
        }
      }
    }
  }
  return seq;
}

motion::PrimitiveSequence gaussian_channel_sequence(int batch, int length,
                                                    std::uint64_t seed,
                                                    double fps) {
  if (batch < 1 || length < 1) {
    throw_error(ErrorKind::Usage, "batch and length must be >= 1");
  }
  const rng::CounterRng gen(seed);
  motion::PrimitiveSequence seq;
  seq.batch = batch;
  seq.length = length;
  seq.fps = fps;
  seq.kind = motion::SequenceKind::Coarse;
  seq.data.resize(static_cast<std::size_t>(batch) * length);
  for (int b = 0; b < batch; ++b) {
    for (int i = 0; i < length; ++i) {
      motion::Primitive& p = seq.at(b, i);
      const std::uint64_t stream =
          static_cast<std::uint64_t>(b) * length + i;
      const std::array<double, 6> id6d = {1, 0, 0, 0, 1, 0};
      std::copy(id6d.begin(), id6d.end(), p.root_rotation().begin());
      auto joints = p.joint_rotations();
      for (int c = 0; c < motion::layout::kJointRotationDims; ++c) {
        joints[c] = gen.normal(stream, c);
      }
    }
  }
  return seq;
}

}  // namespace dk::synth
