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

// AVX2 backend. Uses explicit mul+add (never fmadd) so each lane computes
// exactly the scalar backend's operation sequence.

#include "dancekit/kernels.hpp"

#if defined(DANCEKIT_HAVE_AVX2)

#include <immintrin.h>

namespace dk::kernels {

namespace {

void axpy_avx2(std::size_t n, double a, const double* x, double* y) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d vx = _mm256_loadu_pd(x + i);
    const __m256d vy = _mm256_loadu_pd(y + i);
    _mm256_storeu_pd(y + i, _mm256_add_pd(vy, _mm256_mul_pd(va, vx)));
  }
  for (; i < n; ++i) {
    y[i] += a * x[i];
  }
}

void scale_shift_avx2(std::size_t n, double a, double b, const double* x,
                      double* y) {
  const __m256d va = _mm256_set1_pd(a);
  const __m256d vb = _mm256_set1_pd(b);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d vx = _mm256_loadu_pd(x + i);
    _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_mul_pd(va, vx), vb));
  }
  for (; i < n; ++i) {
    y[i] = a * x[i] + b;
  }
}

void norm_affine_avx2(std::size_t n, double mean, double inv_std,
                      const double* gamma, const double* beta, const double* x,
                      double* y) {
  const __m256d vm = _mm256_set1_pd(mean);
  const __m256d vs = _mm256_set1_pd(inv_std);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d vx = _mm256_loadu_pd(x + i);
    const __m256d vg = _mm256_loadu_pd(gamma + i);
    const __m256d vbt = _mm256_loadu_pd(beta + i);
    const __m256d centered = _mm256_mul_pd(_mm256_sub_pd(vx, vm), vs);
    _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_mul_pd(centered, vg), vbt));
  }
  for (; i < n; ++i) {
    y[i] = (x[i] - mean) * inv_std * gamma[i] + beta[i];
  }
}

}  // namespace

const Ops* avx2_ops() {
  if (!__builtin_cpu_supports("avx2")) {
    return nullptr;
  }
  static const Ops table = {axpy_avx2, scale_shift_avx2, norm_affine_avx2,
                            "avx2"};
  return &table;
}

}  // namespace dk::kernels

#else

namespace dk::kernels {

const Ops* avx2_ops() { return nullptr; }

}  // namespace dk::kernels

#endif
