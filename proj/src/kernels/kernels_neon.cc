// Copyright 2026 The robustqn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// AArch64 NEON kernels (float64x2_t lanes). NEON is mandatory on AArch64, so
// no runtime check is needed beyond compiling this file.

#include <arm_neon.h>

#include "kernels_internal.h"

namespace robustqn::kernels::internal {
namespace {

double DotNeon(const double* a, const double* b, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
    acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
  }
  double acc = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double Dot3Neon(const double* w, const double* a, const double* b,
                std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const float64x2_t wa0 = vmulq_f64(vld1q_f64(w + i), vld1q_f64(a + i));
    const float64x2_t wa1 =
        vmulq_f64(vld1q_f64(w + i + 2), vld1q_f64(a + i + 2));
    acc0 = vfmaq_f64(acc0, wa0, vld1q_f64(b + i));
    acc1 = vfmaq_f64(acc1, wa1, vld1q_f64(b + i + 2));
  }
  double acc = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) acc += w[i] * a[i] * b[i];
  return acc;
}

void AxpyNeon(double alpha, const double* x, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(alpha);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

double SumNeon(const double* x, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vaddq_f64(acc0, vld1q_f64(x + i));
    acc1 = vaddq_f64(acc1, vld1q_f64(x + i + 2));
  }
  double acc = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) acc += x[i];
  return acc;
}

double SumSqDevNeon(const double* x, double center, std::size_t n) {
  const float64x2_t vc = vdupq_n_f64(center);
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const float64x2_t d0 = vsubq_f64(vld1q_f64(x + i), vc);
    const float64x2_t d1 = vsubq_f64(vld1q_f64(x + i + 2), vc);
    acc0 = vfmaq_f64(acc0, d0, d0);
    acc1 = vfmaq_f64(acc1, d1, d1);
  }
  double acc = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) {
    const double d = x[i] - center;
    acc += d * d;
  }
  return acc;
}

std::size_t CountLeNeon(const double* x, double threshold, std::size_t n) {
  const float64x2_t vt = vdupq_n_f64(threshold);
  uint64x2_t acc = vdupq_n_u64(0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    // All-ones lanes where x <= t; shifting right by 63 yields 0/1.
    acc = vaddq_u64(acc, vshrq_n_u64(vcleq_f64(vld1q_f64(x + i), vt), 63));
  }
  std::size_t count = static_cast<std::size_t>(vaddvq_u64(acc));
  for (; i < n; ++i) count += (x[i] <= threshold) ? 1 : 0;
  return count;
}

}  // namespace

const KernelTable& NeonTable() {
  static const KernelTable table{DotNeon, Dot3Neon,     AxpyNeon,
                                 SumNeon, SumSqDevNeon, CountLeNeon};
  return table;
}

}  // namespace robustqn::kernels::internal
