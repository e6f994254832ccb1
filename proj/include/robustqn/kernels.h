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

#ifndef ROBUSTQN_KERNELS_H_
#define ROBUSTQN_KERNELS_H_

#include <cstddef>
#include <span>
#include <string_view>

// Data-parallel inner loops shared by the loss models and the aggregators.
//
// Every kernel has a scalar reference implementation and, where the target
// supports it, an AVX2 (x86-64) or NEON (aarch64) variant. The variant is
// picked once at startup from the running CPU; tests pin a specific ISA with
// ScopedIsa to check the variants against the reference.
//
// Reductions in the vector variants use several partial accumulators, so
// floating-point results may differ from the scalar reference in the last few
// ulps. count_le is exact on every ISA.

namespace robustqn::kernels {

enum class Isa { kScalar, kAvx2, kNeon };

std::string_view IsaName(Isa isa);

// True if the ISA was compiled in and the running CPU supports it.
bool IsaAvailable(Isa isa);

// The ISA the dispatcher currently routes to.
Isa ActiveIsa();

// Routes all kernels to `isa`. Returns false (and changes nothing) when the
// ISA is unavailable.
bool SetIsa(Isa isa);

// Restores the previous ISA on destruction.
class ScopedIsa {
 public:
  explicit ScopedIsa(Isa isa);
  ~ScopedIsa();
  ScopedIsa(const ScopedIsa&) = delete;
  ScopedIsa& operator=(const ScopedIsa&) = delete;
  bool ok() const { return ok_; }

 private:
  Isa previous_;
  bool ok_;
};

// sum_i a[i] * b[i]
double Dot(std::span<const double> a, std::span<const double> b);

// sum_i w[i] * a[i] * b[i]
double Dot3(std::span<const double> w, std::span<const double> a,
            std::span<const double> b);

// y[i] += alpha * x[i]
void Axpy(double alpha, std::span<const double> x, std::span<double> y);

// sum_i x[i]
double Sum(std::span<const double> x);

// sum_i (x[i] - center)^2
double SumSquaredDeviation(std::span<const double> x, double center);

// #{i : x[i] <= threshold}
std::size_t CountLessEqual(std::span<const double> x, double threshold);

}  // namespace robustqn::kernels

#endif  // ROBUSTQN_KERNELS_H_
