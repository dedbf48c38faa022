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

#include <cstdlib>
#include <cstring>

#include "dancekit/kernels.hpp"

namespace dk::kernels {

namespace {

void axpy_scalar(std::size_t n, double a, const double* x, double* y) {
  for (std::size_t i = 0; i < n; ++i) {
    y[i] += a * x[i];
  }
}

void scale_shift_scalar(std::size_t n, double a, double b, const double* x,
                        double* y) {
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = a * x[i] + b;
  }
}

void norm_affine_scalar(std::size_t n, double mean, double inv_std,
                        const double* gamma, const double* beta,
                        const double* x, double* y) {
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = (x[i] - mean) * inv_std * gamma[i] + beta[i];
  }
}

}  // namespace

const Ops& scalar_ops() {
  static const Ops table = {axpy_scalar, scale_shift_scalar,
                            norm_affine_scalar, "scalar"};
  return table;
}

const Ops& ops() {
  static const Ops* selected = [] {
    const char* forced = std::getenv("DANCEKIT_KERNELS");
    if (forced != nullptr && std::strcmp(forced, "scalar") == 0) {
      return &scalar_ops();
    }
    const Ops* avx2 = avx2_ops();
    if (avx2 != nullptr &&
        (forced == nullptr || std::strcmp(forced, "avx2") == 0)) {
      return avx2;
    }
    return &scalar_ops();
  }();
  return *selected;
}

}  // namespace dk::kernels
