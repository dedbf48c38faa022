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

#include "dancekit/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "dancekit/error.hpp"

namespace dk::metrics {

namespace {

using motion::Vec3;

std::vector<std::vector<Vec3>> fk_all(std::span<const motion::Primitive> frames,
                                      const motion::Skeleton& s) {
  std::vector<std::vector<Vec3>> positions;
  positions.reserve(frames.size());
  for (const auto& p : frames) {
    positions.push_back(motion::forward_kinematics(p, s));
  }
  return positions;
}

// Symmetric PSD square root, eigenvalues clamped at zero.
Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& m) {
  const Eigen::MatrixXd sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym);
  Eigen::VectorXd eigs = solver.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return solver.eigenvectors() * eigs.asDiagonal() *
         solver.eigenvectors().transpose();
}

}  // namespace

void BeatTrack::validate() const {
  if (fps <= 0.0) {
    throw_error(ErrorKind::Schema, "beat track fps must be positive");
  }
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!std::isfinite(times[i]) || times[i] < 0.0) {
      throw_error(ErrorKind::Schema,
                  "beat times must be finite and nonnegative");
    }
    if (i > 0 && times[i] <= times[i - 1]) {
      throw_error(ErrorKind::Schema, "beat times must be strictly increasing");
    }
  }
}

std::vector<Template> default_templates() {
  using K = Template::Kind;
  return {
      {"left_wrist_above_head", K::Above, "left_wrist", "head", 0.0},
      {"right_wrist_above_head", K::Above, "right_wrist", "head", 0.0},
      {"left_wrist_above_left_shoulder", K::Above, "left_wrist",
       "left_shoulder", 0.0},
      {"right_wrist_above_right_shoulder", K::Above, "right_wrist",
       "right_shoulder", 0.0},
      {"left_elbow_above_left_shoulder", K::Above, "left_elbow",
       "left_shoulder", 0.0},
      {"right_elbow_above_right_shoulder", K::Above, "right_elbow",
       "right_shoulder", 0.0},
      {"left_knee_above_pelvis", K::Above, "left_knee", "pelvis", 0.0},
      {"right_knee_above_pelvis", K::Above, "right_knee", "pelvis", 0.0},
      {"left_ankle_above_left_knee", K::Above, "left_ankle", "left_knee", 0.0},
      {"right_ankle_above_right_knee", K::Above, "right_ankle", "right_knee",
       0.0},
      {"left_foot_above_right_foot", K::Above, "left_foot", "right_foot", 0.1},
      {"right_foot_above_left_foot", K::Above, "right_foot", "left_foot", 0.1},
      {"head_above_pelvis", K::Above, "head", "pelvis", 0.5},
      {"pelvis_above_left_ankle", K::Above, "pelvis", "left_ankle", 0.6},
      {"left_wrist_above_pelvis", K::Above, "left_wrist", "pelvis", 0.2},
      {"right_wrist_above_pelvis", K::Above, "right_wrist", "pelvis", 0.2},
      {"hands_together", K::Near, "left_wrist", "right_wrist", 0.15},
      {"left_wrist_near_head", K::Near, "left_wrist", "head", 0.25},
      {"right_wrist_near_head", K::Near, "right_wrist", "head", 0.25},
      {"left_wrist_near_left_hip", K::Near, "left_wrist", "left_hip", 0.2},
      {"right_wrist_near_right_hip", K::Near, "right_wrist", "right_hip", 0.2},
      {"left_wrist_near_right_hip", K::Near, "left_wrist", "right_hip", 0.3},
      {"right_wrist_near_left_hip", K::Near, "right_wrist", "left_hip", 0.3},
      {"feet_together", K::Near, "left_ankle", "right_ankle", 0.15},
      {"elbows_together", K::Near, "left_elbow", "right_elbow", 0.25},
      {"left_wrist_near_left_shoulder", K::Near, "left_wrist", "left_shoulder",
       0.2},
      {"right_wrist_near_right_shoulder", K::Near, "right_wrist",
       "right_shoulder", 0.2},
      {"left_foot_near_right_knee", K::Near, "left_foot", "right_knee", 0.2},
      {"right_foot_near_left_knee", K::Near, "right_foot", "left_knee", 0.2},
      {"left_wrist_near_left_knee", K::Near, "left_wrist", "left_knee", 0.25},
      {"right_wrist_near_right_knee", K::Near, "right_wrist", "right_knee",
       0.25},
      {"left_elbow_near_left_knee", K::Near, "left_elbow", "left_knee", 0.3},
  };
}

Eigen::VectorXd kinetic_features(std::span<const motion::Primitive> frames,
                                 const motion::Skeleton& s, double fps) {
  const int T = static_cast<int>(frames.size());
  if (T < 3) {
    throw_error(ErrorKind::InsufficientData,
                "kinetic features need at least 3 frames");
  }
  const auto positions = fk_all(frames, s);
  const int nj = motion::layout::kJointCount;

  Eigen::VectorXd features(2 * nj);
  for (int j = 0; j < nj; ++j) {
    double speed_sq = 0.0;
    for (int t = 1; t < T; ++t) {
      const Vec3 d = positions[t][j] - positions[t - 1][j];
      const double v = d.norm() * fps;
      speed_sq += v * v;
    }
    features[j] = std::sqrt(speed_sq / (T - 1));

    double accel_sq = 0.0;
    for (int t = 1; t + 1 < T; ++t) {
      const Vec3 d = positions[t + 1][j] - positions[t][j] * 2.0 +
                     positions[t - 1][j];
      const double a = d.norm() * fps * fps;
      accel_sq += a * a;
    }
    features[nj + j] = std::sqrt(accel_sq / (T - 2));
  }
  return features;
}

Eigen::VectorXd geometric_features(std::span<const motion::Primitive> frames,
                                   const motion::Skeleton& s,
                                   const std::vector<Template>& templates) {
  if (frames.empty()) {
    throw_error(ErrorKind::InsufficientData,
                "geometric features need at least 1 frame");
  }
  if (templates.empty()) {
    throw_error(ErrorKind::Config, "template set must be nonempty");
  }
  std::vector<std::pair<int, int>> joints;
  joints.reserve(templates.size());
  for (const Template& t : templates) {
    const int a = s.joint_index(t.joint_a);
    const int b = s.joint_index(t.joint_b);
    if (a < 0 || b < 0) {
      throw_error(ErrorKind::Config, "template '" + t.name +
                                         "' references an unknown joint");
    }
    joints.emplace_back(a, b);
  }

  const auto positions = fk_all(frames, s);
  Eigen::VectorXd features = Eigen::VectorXd::Zero(
      static_cast<Eigen::Index>(templates.size()));
  for (const auto& pose : positions) {
    for (std::size_t t = 0; t < templates.size(); ++t) {
      const Vec3& pa = pose[joints[t].first];
      const Vec3& pb = pose[joints[t].second];
      const bool hold = templates[t].kind == Template::Kind::Above
                            ? pa.y > pb.y + templates[t].margin
                            : (pa - pb).norm() < templates[t].margin;
      if (hold) {
        features[static_cast<Eigen::Index>(t)] += 1.0;
      }
    }
  }
  features /= static_cast<double>(frames.size());
  return features;
}

GaussianStats gaussian_stats(const Eigen::MatrixXd& rows) {
  const Eigen::Index m = rows.rows();
  if (m < 2) {
    throw_error(ErrorKind::InsufficientData,
                "covariance needs at least 2 feature rows");
  }
  GaussianStats stats;
  stats.mean = rows.colwise().mean();
  const Eigen::MatrixXd centered = rows.rowwise() - stats.mean.transpose();
  const Eigen::MatrixXd cov =
      centered.transpose() * centered / static_cast<double>(m - 1);
  stats.cov = 0.5 * (cov + cov.transpose());
  return stats;
}

double fid(const GaussianStats& a, const GaussianStats& b) {
  if (a.mean.size() != b.mean.size() || a.cov.rows() != b.cov.rows()) {
    throw_error(ErrorKind::Config, "FID: feature dimensions differ");
  }
  const Eigen::MatrixXd sqrt_a = psd_sqrt(a.cov);
  const Eigen::MatrixXd inner = sqrt_a * b.cov * sqrt_a;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
      0.5 * (inner + inner.transpose()));
  const double trace_sqrt =
      solver.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
  const double value = (a.mean - b.mean).squaredNorm() + a.cov.trace() +
                       b.cov.trace() - 2.0 * trace_sqrt;
  return std::max(value, 0.0);
}

double diversity(const Eigen::MatrixXd& rows) {
  const Eigen::Index m = rows.rows();
  if (m < 2) {
    throw_error(ErrorKind::InsufficientData,
                "diversity needs at least 2 feature rows");
  }
  double total = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = i + 1; j < m; ++j) {
      total += (rows.row(i) - rows.row(j)).norm();
    }
  }
  return total / (static_cast<double>(m) * (m - 1) / 2.0);
}

BeatTrack kinematic_beats(std::span<const motion::Primitive> frames,
                          const motion::Skeleton& s, double fps, int window) {
  const int T = static_cast<int>(frames.size());
  if (window < 1) {
    throw_error(ErrorKind::Config, "beat window must be >= 1");
  }
  if (T < 2 * window + 1) {
    throw_error(ErrorKind::InsufficientData,
                "kinematic beats need at least 2*window+1 frames");
  }
  const auto positions = fk_all(frames, s);
  const int nj = motion::layout::kJointCount;

  // v[t] = mean joint speed between frames t-1 and t, for t = 1..T-1.
  std::vector<double> speed(T, 0.0);
  for (int t = 1; t < T; ++t) {
    double sum = 0.0;
    for (int j = 0; j < nj; ++j) {
      sum += (positions[t][j] - positions[t - 1][j]).norm() * fps;
    }
    speed[t] = sum / nj;
  }

  BeatTrack track;
  track.fps = fps;
  for (int t = 1 + window; t + window < T; ++t) {
    bool strict_min = true;
    for (int u = t - window; u <= t + window; ++u) {
      if (u != t && speed[u] <= speed[t]) {
        strict_min = false;
        break;
      }
    }
    if (strict_min) {
      track.times.push_back(static_cast<double>(t));
    }
  }
  return track;
}

double beat_alignment_score(const BeatTrack& music, const BeatTrack& kin,
                            double sigma) {
  if (sigma <= 0.0) {
    throw_error(ErrorKind::Config, "BAS sigma must be positive");
  }
  if (music.times.empty()) {
    throw_error(ErrorKind::InsufficientData, "music beat track is empty");
  }
  if (kin.times.empty()) {
    return 0.0;
  }
  double total = 0.0;
  for (double tm : music.times) {
    double best = std::numeric_limits<double>::infinity();
    for (double tk : kin.times) {
      best = std::min(best, (tk - tm) * (tk - tm));
    }
    total += std::exp(-best / (2.0 * sigma * sigma));
  }
  return total / static_cast<double>(music.times.size());
}

double foot_skating_ratio(std::span<const motion::Primitive> frames,
                          const motion::Skeleton& s, const FsrThresholds& th) {
  if (frames.size() < 2) {
    throw_error(ErrorKind::InsufficientData, "FSR needs at least 2 frames");
  }
  if (s.foot_joints.empty()) {
    throw_error(ErrorKind::Config, "skeleton has no foot joints");
  }
  if (!(th.height_max > 0.0) || !(th.speed_min > 0.0)) {
    throw_error(ErrorKind::Config, "FSR thresholds must be positive");
  }
  const auto positions = fk_all(frames, s);
  const int T = static_cast<int>(frames.size());
  int skating = 0;
  for (int t = 1; t < T; ++t) {
    bool frame_skates = false;
    for (int j : s.foot_joints) {
      const Vec3& cur = positions[t][j];
      const Vec3& prev = positions[t - 1][j];
      const double dx = cur.x - prev.x;
      const double dz = cur.z - prev.z;
      const double horizontal = std::sqrt(dx * dx + dz * dz);
      if (cur.y < th.height_max && horizontal > th.speed_min) {
        frame_skates = true;
        break;
      }
    }
    if (frame_skates) {
      ++skating;
    }
  }
  return static_cast<double>(skating) / (T - 1);
}

BoundaryReport boundary_discontinuity(const motion::PrimitiveSequence& seq) {
  if (seq.length < 2) {
    throw_error(ErrorKind::InsufficientData,
                "boundary discontinuity needs at least 2 primitives");
  }
  BoundaryReport report;
  report.per_junction.reserve(static_cast<std::size_t>(seq.batch) *
                              (seq.length - 1));
  double total = 0.0;
  for (int b = 0; b < seq.batch; ++b) {
    for (int i = 0; i + 1 < seq.length; ++i) {
      const auto cur = seq.at(b, i).joint_rotations();
      const auto next = seq.at(b, i + 1).joint_rotations();
      double sq = 0.0;
      for (int c = 0; c < motion::layout::kJointRotationDims; ++c) {
        const double d = next[c] - cur[c];
        sq += d * d;
      }
      const double dist = std::sqrt(sq);
      report.per_junction.push_back(dist);
      total += dist;
    }
  }
  report.mean = total / static_cast<double>(report.per_junction.size());
  return report;
}

}  // namespace dk::metrics
