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

#include "dancekit/motion.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "dancekit/error.hpp"

namespace dk::motion {

namespace {

constexpr double kDegenerateEps = 1e-8;

bool is_degenerate_rot6d(std::span<const double, 6> r) {
  const Vec3 a{r[0], r[1], r[2]};
  const Vec3 b{r[3], r[4], r[5]};
  const double na = a.norm();
  if (na <= kDegenerateEps) {
    return true;
  }
  const Vec3 c1 = a * (1.0 / na);
  return c1.cross(b).norm() <= kDegenerateEps;
}

}  // namespace

double Vec3::norm() const { return std::sqrt(x * x + y * y + z * z); }

Mat3 Mat3::identity() {
  return {{Vec3{1, 0, 0}, Vec3{0, 1, 0}, Vec3{0, 0, 1}}};
}

Vec3 Mat3::operator*(const Vec3& v) const {
  return cols[0] * v.x + cols[1] * v.y + cols[2] * v.z;
}

Mat3 Mat3::operator*(const Mat3& o) const {
  return {{(*this) * o.cols[0], (*this) * o.cols[1], (*this) * o.cols[2]}};
}

Mat3 Mat3::transposed() const {
  return {{Vec3{cols[0].x, cols[1].x, cols[2].x},
           Vec3{cols[0].y, cols[1].y, cols[2].y},
           Vec3{cols[0].z, cols[1].z, cols[2].z}}};
}

double Mat3::det() const { return cols[0].dot(cols[1].cross(cols[2])); }

Primitive make_primitive(std::span<const double> values) {
  if (values.size() != static_cast<std::size_t>(layout::kTotal)) {
    throw_error(ErrorKind::Layout,
                "primitive must have 139 channels, got " +
                    std::to_string(values.size()));
  }
  Primitive p;
  std::copy(values.begin(), values.end(), p.channels.begin());
  return p;
}

std::string to_string(SequenceKind kind) {
  switch (kind) {
    case SequenceKind::Coarse:
      return "coarse";
    case SequenceKind::Fine:
      return "fine";
    case SequenceKind::Mixed:
      return "mixed";
  }
  return "coarse";
}

SequenceKind sequence_kind_from_string(const std::string& s) {
  if (s == "coarse") return SequenceKind::Coarse;
  if (s == "fine") return SequenceKind::Fine;
  if (s == "mixed") return SequenceKind::Mixed;
  throw_error(ErrorKind::Schema, "unknown sequence kind '" + s + "'");
}

void Skeleton::validate() const {
  const int n = layout::kJointCount;
  if (joint_names.size() != static_cast<std::size_t>(n) ||
      parents.size() != static_cast<std::size_t>(n) ||
      offsets.size() != static_cast<std::size_t>(n)) {
    throw_error(ErrorKind::Schema,
                "skeleton must have exactly 22 joints (names/parents/offsets)");
  }
  if (parents[0] != -1) {
    throw_error(ErrorKind::Schema, "parents[0] must be -1 (root)");
  }
  for (int i = 1; i < n; ++i) {
    if (parents[i] < 0 || parents[i] >= i) {
      throw_error(ErrorKind::Schema,
                  "parents[" + std::to_string(i) +
                      "] must reference an earlier joint, got " +
                      std::to_string(parents[i]));
    }
  }
  std::set<int> paired;
  for (const auto& [l, r] : mirror_pairs) {
    if (l <= 0 || l >= n || r <= 0 || r >= n || l == r) {
      throw_error(ErrorKind::Schema, "invalid mirror pair (" +
                                         std::to_string(l) + ", " +
                                         std::to_string(r) + ")");
    }
    if (!paired.insert(l).second || !paired.insert(r).second) {
      throw_error(ErrorKind::Schema,
                  "joint appears in more than one mirror pair");
    }
  }
  if (foot_joints.empty() || foot_joints.size() % 2 != 0) {
    throw_error(ErrorKind::Schema,
                "foot_joints must list left/right pairs (even, nonempty)");
  }
  for (int j : foot_joints) {
    if (j < 0 || j >= n) {
      throw_error(ErrorKind::Schema,
                  "foot joint index out of range: " + std::to_string(j));
    }
  }
}

int Skeleton::joint_index(const std::string& name) const {
  for (std::size_t i = 0; i < joint_names.size(); ++i) {
    if (joint_names[i] == name) {
      return static_cast<int>(i);
    }
  }
  return -1;
}

Skeleton Skeleton::default_humanoid() {
  Skeleton s;
  s.joint_names = {
      "pelvis",        "left_hip",       "right_hip",      "spine1",
      "left_knee",     "right_knee",     "spine2",         "left_ankle",
      "right_ankle",   "spine3",         "left_foot",      "right_foot",
      "neck",          "left_collar",    "right_collar",   "head",
      "left_shoulder", "right_shoulder", "left_elbow",     "right_elbow",
      "left_wrist",    "right_wrist"};
  s.parents = {-1, 0, 0, 0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 9, 9, 12, 13, 14, 16,
               17, 18, 19};
  s.offsets = {
      {0.00, 0.00, 0.00},   // pelvis
      {0.09, -0.09, 0.00},  // left_hip
      {-0.09, -0.09, 0.00}, // right_hip
      {0.00, 0.11, 0.00},   // spine1
      {0.04, -0.38, 0.00},  // left_knee
      {-0.04, -0.38, 0.00}, // right_knee
      {0.00, 0.14, 0.00},   // spine2
      {0.02, -0.40, -0.03}, // left_ankle
      {-0.02, -0.40, -0.03},// right_ankle
      {0.00, 0.06, 0.00},   // spine3
      {0.03, -0.06, 0.12},  // left_foot
      {-0.03, -0.06, 0.12}, // right_foot
      {0.00, 0.22, 0.00},   // neck
      {0.07, 0.12, 0.00},   // left_collar
      {-0.07, 0.12, 0.00},  // right_collar
      {0.00, 0.07, 0.00},   // head
      {0.09, 0.04, 0.00},   // left_shoulder
      {-0.09, 0.04, 0.00},  // right_shoulder
      {0.26, 0.00, 0.00},   // left_elbow
      {-0.26, 0.00, 0.00},  // right_elbow
      {0.25, 0.00, 0.00},   // left_wrist
      {-0.25, 0.00, 0.00},  // right_wrist
  };
  s.mirror_pairs = {{1, 2}, {4, 5}, {7, 8}, {10, 11},
                    {13, 14}, {16, 17}, {18, 19}, {20, 21}};
  s.foot_joints = {7, 8, 10, 11};
  s.validate();
  return s;
}

ChannelParts split_channels(const Primitive& p) {
  ChannelParts parts;
  std::copy_n(p.channels.begin() + layout::kFootOffset, 4, parts.foot.begin());
  std::copy_n(p.channels.begin() + layout::kRootTranslationOffset, 3,
              parts.root_translation.begin());
  std::copy_n(p.channels.begin() + layout::kRootRotationOffset, 6,
              parts.root_rotation.begin());
  std::copy_n(p.channels.begin() + layout::kJointRotationOffset,
              layout::kJointRotationDims, parts.joint_rotations.begin());
  return parts;
}

Primitive join_channels(const ChannelParts& parts) {
  Primitive p;
  std::copy(parts.foot.begin(), parts.foot.end(),
            p.channels.begin() + layout::kFootOffset);
  std::copy(parts.root_translation.begin(), parts.root_translation.end(),
            p.channels.begin() + layout::kRootTranslationOffset);
  std::copy(parts.root_rotation.begin(), parts.root_rotation.end(),
            p.channels.begin() + layout::kRootRotationOffset);
  std::copy(parts.joint_rotations.begin(), parts.joint_rotations.end(),
            p.channels.begin() + layout::kJointRotationOffset);
  return p;
}

Mat3 rot6d_to_matrix(std::span<const double, 6> r) {
  const Vec3 a{r[0], r[1], r[2]};
  const Vec3 b{r[3], r[4], r[5]};
  const double na = a.norm();
  if (na <= kDegenerateEps) {
    throw_error(ErrorKind::DegenerateRotation,
                "6D rotation: first 3-vector is near zero");
  }
  const Vec3 c1 = a * (1.0 / na);
  if (c1.cross(b).norm() <= kDegenerateEps) {
    throw_error(ErrorKind::DegenerateRotation,
                "6D rotation: vectors are near parallel");
  }
  const Vec3 w = b - c1 * b.dot(c1);
  const Vec3 c2 = w * (1.0 / w.norm());
  const Vec3 c3 = c1.cross(c2);
  return {{c1, c2, c3}};
}

std::array<double, 6> matrix_to_rot6d(const Mat3& m) {
  const Mat3 gram = m.transposed() * m;
  const Mat3 id = Mat3::identity();
  double max_dev = 0.0;
  for (int c = 0; c < 3; ++c) {
    max_dev = std::max(max_dev, std::abs(gram.cols[c].x - id.cols[c].x));
    max_dev = std::max(max_dev, std::abs(gram.cols[c].y - id.cols[c].y));
    max_dev = std::max(max_dev, std::abs(gram.cols[c].z - id.cols[c].z));
  }
  if (max_dev > 1e-6) {
    throw_error(ErrorKind::InvalidMatrix, "matrix is not orthonormal");
  }
  if (m.det() <= 0.0) {
    throw_error(ErrorKind::InvalidMatrix,
                "matrix determinant must be positive");
  }
  return {m.cols[0].x, m.cols[0].y, m.cols[0].z,
          m.cols[1].x, m.cols[1].y, m.cols[1].z};
}

std::vector<Vec3> forward_kinematics(const Primitive& p, const Skeleton& s) {
  s.validate();
  const int n = layout::kJointCount;
  std::vector<Vec3> positions(n);
  std::vector<Mat3> global(n);

  auto local_rotation = [&](int joint) -> Mat3 {
    try {
      if (joint == 0) {
        return rot6d_to_matrix(p.root_rotation());
      }
      return rot6d_to_matrix(p.joint_rot6d(joint - 1));
    } catch (const Error& e) {
      throw_error(ErrorKind::DegenerateRotation,
                  "joint '" + s.joint_names[joint] + "': " + e.what());
    }
  };

  // Accumulate root-relative positions first and add the root translation
  // once per joint: translating the root then translates every output by
  // bitwise the same amount.
  positions[0] = {0.0, 0.0, 0.0};
  global[0] = local_rotation(0);
  for (int i = 1; i < n; ++i) {
    const int parent = s.parents[i];
    positions[i] = positions[parent] + global[parent] * s.offsets[i];
    global[i] = global[parent] * local_rotation(i);
  }
  const auto t = p.root_translation();
  const Vec3 root{t[0], t[1], t[2]};
  for (auto& pos : positions) {
    pos = pos + root;
  }
  return positions;
}

Primitive mirror(const Primitive& p, const Skeleton& s) {
  s.validate();

  // Conjugation by the x-reflection F = diag(-1,1,1): flips the sign of
  // every element with exactly one x index.
  auto reflect = [](const Mat3& m) {
    Mat3 out = m;
    out.cols[0].y = -m.cols[0].y;
    out.cols[0].z = -m.cols[0].z;
    out.cols[1].x = -m.cols[1].x;
    out.cols[2].x = -m.cols[2].x;
    return out;
  };

  std::vector<int> partner(layout::kJointCount);
  for (int i = 0; i < layout::kJointCount; ++i) {
    partner[i] = i;
  }
  for (const auto& [l, r] : s.mirror_pairs) {
    partner[l] = r;
    partner[r] = l;
  }
  for (int i = 1; i < layout::kJointCount; ++i) {
    if (partner[i] == i && std::abs(s.offsets[i].x) > 1e-6) {
      throw_error(ErrorKind::Config,
                  "mirror_pairs do not cover off-midline joint '" +
                      s.joint_names[i] + "'");
    }
  }

  Primitive out = p;
  out.root_translation()[0] = -p.root_translation()[0];

  const auto root6d = matrix_to_rot6d(reflect(rot6d_to_matrix(p.root_rotation())));
  std::copy(root6d.begin(), root6d.end(), out.root_rotation().begin());

  for (int j = 1; j < layout::kJointCount; ++j) {
    const int src = partner[j];
    const auto r6d =
        matrix_to_rot6d(reflect(rot6d_to_matrix(p.joint_rot6d(src - 1))));
    std::copy(r6d.begin(), r6d.end(), out.joint_rot6d(j - 1).begin());
  }

  // Foot channels pair up as (left, right) in foot_joints order; channel 2i
  // swaps with channel 2i+1.
  auto foot = out.foot();
  const auto src_foot = p.foot();
  const std::size_t foot_pairs =
      std::min<std::size_t>(s.foot_joints.size(), 4) / 2;
  for (std::size_t i = 0; i < foot_pairs; ++i) {
    foot[2 * i] = src_foot[2 * i + 1];
    foot[2 * i + 1] = src_foot[2 * i];
  }
  return out;
}

std::vector<Violation> validate(const PrimitiveSequence& seq) {
  std::vector<Violation> violations;
  if (seq.batch < 1 || seq.length < 1 ||
      seq.data.size() !=
          static_cast<std::size_t>(seq.batch) * static_cast<std::size_t>(seq.length)) {
    violations.push_back(
        {0, 0, 0, "sequence dimensions inconsistent with data size"});
    return violations;
  }
  for (int b = 0; b < seq.batch; ++b) {
    for (int i = 0; i < seq.length; ++i) {
      const Primitive& p = seq.at(b, i);
      bool all_finite = true;
      for (int c = 0; c < layout::kTotal; ++c) {
        if (!std::isfinite(p.channels[c])) {
          violations.push_back({b, i, c, "non-finite channel value"});
          all_finite = false;
        }
      }
      if (!all_finite) {
        continue;
      }
      if (is_degenerate_rot6d(p.root_rotation())) {
        violations.push_back(
            {b, i, layout::kRootRotationOffset, "degenerate root rotation"});
      }
      for (int k = 0; k < layout::kNonRootJoints; ++k) {
        if (is_degenerate_rot6d(p.joint_rot6d(k))) {
          violations.push_back({b, i, layout::kJointRotationOffset + 6 * k,
                                "degenerate joint rotation block " +
                                    std::to_string(k)});
        }
      }
    }
  }
  return violations;
}

}  // namespace dk::motion
