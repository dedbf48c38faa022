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

// Coarse motion representation: 139-channel primitives, 6D rotation
// utilities, forward kinematics, and mirroring augmentation.

#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace dk::motion {

// Channel layout of one primitive:
//   [0..4)    foot channels (opaque pass-through scalars)
//   [4..7)    root translation, meters
//   [7..13)   root rotation, 6D encoding
//   [13..139) 21 consecutive 6D joint rotations
namespace layout {
constexpr int kFootDims = 4;
constexpr int kRootTranslationDims = 3;
constexpr int kRootRotationDims = 6;
constexpr int kJointRotationDims = 126;
constexpr int kTotal = 139;
constexpr int kNonRootJoints = 21;
constexpr int kJointCount = 22;

constexpr int kFootOffset = 0;
constexpr int kRootTranslationOffset = 4;
constexpr int kRootRotationOffset = 7;
constexpr int kJointRotationOffset = 13;

static_assert(kTotal == kFootDims + kRootTranslationDims + kRootRotationDims +
                            kJointRotationDims);
static_assert(kJointRotationDims == 6 * kNonRootJoints);
}  // namespace layout

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  Vec3 cross(const Vec3& o) const {
    return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
  }
  double norm() const;
};

// Column-major 3x3 rotation matrix.
struct Mat3 {
  std::array<Vec3, 3> cols;

  static Mat3 identity();
  Vec3 operator*(const Vec3& v) const;
  Mat3 operator*(const Mat3& o) const;
  Mat3 transposed() const;
  double det() const;
};

struct Primitive {
  std::array<double, layout::kTotal> channels{};

  std::span<double, 4> foot() {
    return std::span<double, 4>(channels.data() + layout::kFootOffset, 4);
  }
  std::span<const double, 4> foot() const {
    return std::span<const double, 4>(channels.data() + layout::kFootOffset,
                                      4);
  }
  std::span<double, 3> root_translation() {
    return std::span<double, 3>(
        channels.data() + layout::kRootTranslationOffset, 3);
  }
  std::span<const double, 3> root_translation() const {
    return std::span<const double, 3>(
        channels.data() + layout::kRootTranslationOffset, 3);
  }
  std::span<double, 6> root_rotation() {
    return std::span<double, 6>(channels.data() + layout::kRootRotationOffset,
                                6);
  }
  std::span<const double, 6> root_rotation() const {
    return std::span<const double, 6>(
        channels.data() + layout::kRootRotationOffset, 6);
  }
  std::span<double, layout::kJointRotationDims> joint_rotations() {
    return std::span<double, layout::kJointRotationDims>(
        channels.data() + layout::kJointRotationOffset,
        layout::kJointRotationDims);
  }
  std::span<const double, layout::kJointRotationDims> joint_rotations() const {
    return std::span<const double, layout::kJointRotationDims>(
        channels.data() + layout::kJointRotationOffset,
        layout::kJointRotationDims);
  }
  // 6D block of non-root joint k, 0 <= k < 21 (skeleton joint k + 1).
  std::span<double, 6> joint_rot6d(int k) {
    return std::span<double, 6>(
        channels.data() + layout::kJointRotationOffset + 6 * k, 6);
  }
  std::span<const double, 6> joint_rot6d(int k) const {
    return std::span<const double, 6>(
        channels.data() + layout::kJointRotationOffset + 6 * k, 6);
  }

  bool operator==(const Primitive&) const = default;
};

// Throws a layout error unless values has exactly 139 entries.
Primitive make_primitive(std::span<const double> values);

enum class SequenceKind { Coarse, Fine, Mixed };

std::string to_string(SequenceKind kind);
SequenceKind sequence_kind_from_string(const std::string& s);

struct PrimitiveSequence {
  int batch = 1;
  int length = 1;
  double fps = 30.0;
  SequenceKind kind = SequenceKind::Coarse;
  std::vector<Primitive> data;  // batch-major: data[b * length + i]

  Primitive& at(int b, int i) { return data[b * length + i]; }
  const Primitive& at(int b, int i) const { return data[b * length + i]; }

  bool operator==(const PrimitiveSequence&) const = default;
};

struct Skeleton {
  std::vector<std::string> joint_names;           // 22 entries, index 0 = root
  std::vector<int> parents;                       // parents[0] = -1
  std::vector<Vec3> offsets;                      // rest offsets, meters
  std::vector<std::pair<int, int>> mirror_pairs;  // (left, right)
  std::vector<int> foot_joints;  // alternating left/right pairs

  // Throws a schema error if any structural invariant fails.
  void validate() const;

  int joint_index(const std::string& name) const;  // -1 when absent

  // 22-joint SMPL-style humanoid, y-up, meter offsets.
  static Skeleton default_humanoid();
};

struct ChannelParts {
  std::array<double, 4> foot{};
  std::array<double, 3> root_translation{};
  std::array<double, 6> root_rotation{};
  std::array<double, layout::kJointRotationDims> joint_rotations{};
};

ChannelParts split_channels(const Primitive& p);
Primitive join_channels(const ChannelParts& parts);

// Gram-Schmidt reconstruction: c1 = a/|a|, c2 = normalize(b - (b.c1)c1),
// c3 = c1 x c2. Throws a degenerate-rotation error when a is near zero or
// a, b are near parallel.
Mat3 rot6d_to_matrix(std::span<const double, 6> r);

// First two columns of M. Throws an invalid-matrix error unless M is
// orthonormal within 1e-6 with positive determinant.
std::array<double, 6> matrix_to_rot6d(const Mat3& m);

// World-space joint positions; joint 0 is the root.
std::vector<Vec3> forward_kinematics(const Primitive& p, const Skeleton& s);

// Reflects the primitive across the x = 0 plane: root translation x-negated,
// rotations conjugated by diag(-1,1,1), joint blocks and foot channels
// swapped left<->right.
Primitive mirror(const Primitive& p, const Skeleton& s);

struct Violation {
  int batch = 0;
  int index = 0;
  int channel = 0;
  std::string message;
};

// Non-finite entries and degenerate rotation blocks, with coordinates.
// Empty iff the sequence is valid.
std::vector<Violation> validate(const PrimitiveSequence& seq);

}  // namespace dk::motion
