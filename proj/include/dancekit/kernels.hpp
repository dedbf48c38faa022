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

// Data-parallel inner loops of the pooling block. Two backends: a scalar
// reference and an AVX2 variant, selected once at runtime. Both backends
// perform the identical per-element multiply/add sequence (no FMA
// contraction, no reduction reordering), so their results are bit-identical;
// the equivalence tests assert that bitwise.

#pragma once

#include <cstddef>

namespace dk::kernels {

struct Ops {
  // y[i] += a * x[i]
  void (*axpy)(std::size_t n, double a, const double* x, double* y);
  // y[i] = a * x[i] + b
  void (*scale_shift)(std::size_t n, double a, double b, const double* x,
                      double* y);
  // y[i] = (x[i] - mean) * inv_std * gamma[i] + beta[i]
  void (*norm_affine)(std::size_t n, double mean, double inv_std,
                      const double* gamma, const double* beta, const double* x,
                      double* y);
  const char* name;
};

const Ops& scalar_ops();

// AVX2 table, or nullptr when unsupported by the build or the CPU.
const Ops* avx2_ops();

// Active backend: AVX2 when available, unless DANCEKIT_KERNELS=scalar.
const Ops& ops();

}  // namespace dk::kernels
