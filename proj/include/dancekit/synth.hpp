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

// Deterministic synthetic sequences: desk-scale stand-ins for generated
// coarse motion. Rotation channels always hold valid 6D encodings built from
// axis-angle rotations.

#pragma once

#include <cstdint>
#include <string>

#include "dancekit/motion.hpp"

namespace dk::synth {

enum class Kind {
  IidGaussian,  // independent pose per frame, Gaussian root translation
  RandomWalk,   // small-step walk in root translation and joint rotations
  Sinusoid,     // deterministic sinusoidal joint angles (see sinusoid_angle)
};

Kind kind_from_string(const std::string& s);
std::string to_string(Kind kind);

// Sinusoid kind: non-root joint k at frame i of batch row b rotates about the
// x axis by this angle. Amplitude 0.5 rad, period 20 frames, phase k*pi/8 +
// b*pi/4. Root translation x follows 0.5*sin(2*pi*i/20).
double sinusoid_angle(int joint_k, int frame_i, int batch_b);

motion::PrimitiveSequence synthesize(Kind kind, int batch, int length,
                                     std::uint64_t seed, double fps = 30.0);

// Joint-rotation channels filled with iid standard normals (valid with
// probability 1); other channels zeroed except an identity root rotation.
// Used by the smoothing diagnostics and tests.
motion::PrimitiveSequence gaussian_channel_sequence(int batch, int length,
                                                    std::uint64_t seed,
                                                    double fps = 30.0);

}  // namespace dk::synth
