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

#ifndef ROBUSTQN_SRC_KERNELS_KERNELS_INTERNAL_H_
#define ROBUSTQN_SRC_KERNELS_KERNELS_INTERNAL_H_

#include <cstddef>

namespace robustqn::kernels::internal {

// Raw-pointer kernel table. Lengths are validated by the public wrappers.
struct KernelTable {
  double (*dot)(const double* a, const double* b, std::size_t n);
  double (*dot3)(const double* w, const double* a, const double* b,
                 std::size_t n);
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  double (*sum)(const double* x, std::size_t n);
  double (*sum_sq_dev)(const double* x, double center, std::size_t n);
  std::size_t (*count_le)(const double* x, double threshold, std::size_t n);
};

const KernelTable& ScalarTable();
#if defined(ROBUSTQN_HAVE_AVX2)
const KernelTable& Avx2Table();
#endif
#if defined(ROBUSTQN_HAVE_NEON)
const KernelTable& NeonTable();
#endif

}  // namespace robustqn::kernels::internal

#endif  // ROBUSTQN_SRC_KERNELS_KERNELS_INTERNAL_H_
