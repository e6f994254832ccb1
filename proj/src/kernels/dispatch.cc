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

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "kernels_internal.h"
#include "robustqn/kernels.h"

namespace robustqn::kernels {
namespace {

using internal::KernelTable;

bool CpuHasAvx2() {
#if defined(ROBUSTQN_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable* TableFor(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return &internal::ScalarTable();
    case Isa::kAvx2:
#if defined(ROBUSTQN_HAVE_AVX2)
      if (CpuHasAvx2()) return &internal::Avx2Table();
#endif
      return nullptr;
    case Isa::kNeon:
#if defined(ROBUSTQN_HAVE_NEON)
      return &internal::NeonTable();
#else
      return nullptr;
#endif
  }
  return nullptr;
}

Isa DetectBestIsa() {
  // ROBUSTQN_ISA=scalar|avx2|neon overrides detection (unknown values and
  // unavailable ISAs fall back to detection).
  if (const char* env = std::getenv("ROBUSTQN_ISA")) {
    const std::string want(env);
    if (want == "scalar") return Isa::kScalar;
    if (want == "avx2" && TableFor(Isa::kAvx2)) return Isa::kAvx2;
    if (want == "neon" && TableFor(Isa::kNeon)) return Isa::kNeon;
  }
  if (TableFor(Isa::kAvx2)) return Isa::kAvx2;
  if (TableFor(Isa::kNeon)) return Isa::kNeon;
  return Isa::kScalar;
}

struct Dispatcher {
  std::atomic<Isa> isa;
  std::atomic<const KernelTable*> table;
  Dispatcher() {
    const Isa best = DetectBestIsa();
    isa.store(best);
    table.store(TableFor(best));
  }
};

Dispatcher& GetDispatcher() {
  static Dispatcher dispatcher;
  return dispatcher;
}

const KernelTable& Active() {
  return *GetDispatcher().table.load(std::memory_order_relaxed);
}

void CheckSameLength(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw std::invalid_argument(std::string(what) + ": length mismatch (" +
                                std::to_string(a) + " vs " +
                                std::to_string(b) + ")");
  }
}

}  // namespace

std::string_view IsaName(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return "scalar";
    case Isa::kAvx2:
      return "avx2";
    case Isa::kNeon:
      return "neon";
  }
  return "unknown";
}

bool IsaAvailable(Isa isa) { return TableFor(isa) != nullptr; }

Isa ActiveIsa() { return GetDispatcher().isa.load(); }

bool SetIsa(Isa isa) {
  const KernelTable* table = TableFor(isa);
  if (table == nullptr) return false;
  Dispatcher& d = GetDispatcher();
  d.table.store(table);
  d.isa.store(isa);
  return true;
}

ScopedIsa::ScopedIsa(Isa isa) : previous_(ActiveIsa()), ok_(SetIsa(isa)) {}

ScopedIsa::~ScopedIsa() { SetIsa(previous_); }

double Dot(std::span<const double> a, std::span<const double> b) {
  CheckSameLength(a.size(), b.size(), "Dot");
  return Active().dot(a.data(), b.data(), a.size());
}

double Dot3(std::span<const double> w, std::span<const double> a,
            std::span<const double> b) {
  CheckSameLength(w.size(), a.size(), "Dot3");
  CheckSameLength(a.size(), b.size(), "Dot3");
  return Active().dot3(w.data(), a.data(), b.data(), a.size());
}

void Axpy(double alpha, std::span<const double> x, std::span<double> y) {
  CheckSameLength(x.size(), y.size(), "Axpy");
  Active().axpy(alpha, x.data(), y.data(), x.size());
}

double Sum(std::span<const double> x) {
  return Active().sum(x.data(), x.size());
}

double SumSquaredDeviation(std::span<const double> x, double center) {
  return Active().sum_sq_dev(x.data(), center, x.size());
}

std::size_t CountLessEqual(std::span<const double> x, double threshold) {
  return Active().count_le(x.data(), threshold, x.size());
}

}  // namespace robustqn::kernels
