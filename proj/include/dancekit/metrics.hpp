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

// Evaluation suite: kinetic/geometric features, Frechet distance between
// fitted Gaussians, diversity, foot-skating ratio, beat alignment, and
// boundary-discontinuity diagnostics.

#pragma once

#include <Eigen/Dense>
#include <span>
#include <string>
#include <vector>

#include "dancekit/motion.hpp"

namespace dk::metrics {

enum class FeatureKind { Kinetic, Geometric };

struct FeatureSet {
  Eigen::MatrixXd rows;  // one feature vector per motion clip
  FeatureKind kind = FeatureKind::Kinetic;
};

struct GaussianStats {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};

struct BeatTrack {
  std::vector<double> times;  // beat positions in frames, strictly increasing
  double fps = 30.0;

  // Throws a schema error unless times are nonnegative, strictly increasing.
  void validate() const;
};

struct FsrThresholds {
  double height_max = 0.05;  // meters
  double speed_min = 0.01;   // meters per frame, horizontal
};

struct Template {
  enum class Kind { Above, Near };
  std::string name;
  Kind kind = Kind::Above;
  std::string joint_a;
  std::string joint_b;
  double margin = 0.0;
};

// The 32 predicates shipped as the default template set.
std::vector<Template> default_templates();

// Per joint: RMS speed (m/s) and RMS acceleration (m/s^2) from FK positions.
// 44 entries: [22 speeds, 22 accelerations]. Needs >= 3 frames.
Eigen::VectorXd kinetic_features(std::span<const motion::Primitive> frames,
                                 const motion::Skeleton& s, double fps);

// Per template: fraction of frames where the predicate holds.
Eigen::VectorXd geometric_features(std::span<const motion::Primitive> frames,
                                   const motion::Skeleton& s,
                                   const std::vector<Template>& templates);

// Column mean and unbiased sample covariance, symmetrized. Needs m >= 2 rows.
GaussianStats gaussian_stats(const Eigen::MatrixXd& rows);

// |mu_a - mu_b|^2 + Tr(Sa + Sb - 2 (Sa^1/2 Sb Sa^1/2)^1/2), square roots via
// symmetric eigendecomposition with eigenvalues clamped at zero.
double fid(const GaussianStats& a, const GaussianStats& b);

// Mean Euclidean distance over all unordered row pairs.
double diversity(const Eigen::MatrixXd& rows);

// Beats = strict local minima of the mean joint speed series within a
// centered window of size 2*window+1; returns frame indices.
BeatTrack kinematic_beats(std::span<const motion::Primitive> frames,
                          const motion::Skeleton& s, double fps,
                          int window = 2);

// Mean over music beats of exp(-d^2 / (2 sigma^2)) to the nearest kinematic
// beat; 0 when the kinematic track is empty.
double beat_alignment_score(const BeatTrack& music, const BeatTrack& kin,
                            double sigma = 3.0);

// Fraction of frames (t >= 1) where any foot joint sits below height_max and
// moved horizontally more than speed_min since the previous frame.
double foot_skating_ratio(std::span<const motion::Primitive> frames,
                          const motion::Skeleton& s, const FsrThresholds& th);

struct BoundaryReport {
  std::vector<double> per_junction;  // batch-major: (b, i) -> b*(n-1)+i
  double mean = 0.0;
};

// L2 distance over the 126 joint-rotation channels at each adjacent pair.
BoundaryReport boundary_discontinuity(const motion::PrimitiveSequence& seq);

struct MetricsReport {
  double fid_k = 0.0;
  double fid_g = 0.0;
  double div_k = 0.0;
  double div_g = 0.0;
  double fsr = 0.0;
  double bas = 0.0;
  double boundary_discontinuity = 0.0;
  double runtime_ms = 0.0;
  // config echoes
  double fsr_height_max = 0.0;
  double fsr_speed_min = 0.0;
  double bas_sigma = 0.0;
  std::string templates_hash;
};

}  // namespace dk::metrics
