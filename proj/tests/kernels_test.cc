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

#include "robustqn/kernels.h"

#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

namespace robustqn::kernels {
namespace {

std::vector<double> RandomVector(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> dist;
  std::vector<double> v(n);
  for (double& x : v) x = dist(rng);
  return v;
}

std::vector<Isa> VectorIsas() {
  std::vector<Isa> out;
  for (Isa isa : {Isa::kAvx2, Isa::kNeon}) {
    if (IsaAvailable(isa)) out.push_back(isa);
  }
  return out;
}

TEST(KernelsTest, ScalarAlwaysAvailable) {
  EXPECT_TRUE(IsaAvailable(Isa::kScalar));
  ScopedIsa scope(Isa::kScalar);
  EXPECT_TRUE(scope.ok());
  EXPECT_EQ(ActiveIsa(), Isa::kScalar);
}

TEST(KernelsTest, ScopedIsaRestores) {
  const Isa before = ActiveIsa();
  {
    ScopedIsa scope(Isa::kScalar);
    EXPECT_EQ(ActiveIsa(), Isa::kScalar);
  }
  EXPECT_EQ(ActiveIsa(), before);
}

TEST(KernelsTest, ScalarHandValues) {
  ScopedIsa scope(Isa::kScalar);
  const std::vector<double> a = {1, 2, 3};
  const std::vector<double> b = {4, -5, 6};
  const std::vector<double> w = {0.5, 2, 1};
  EXPECT_DOUBLE_EQ(Dot(a, b), 12.0);
  EXPECT_DOUBLE_EQ(Dot3(w, a, b), 2.0 - 20.0 + 18.0);
  EXPECT_DOUBLE_EQ(Sum(b), 5.0);
  EXPECT_DOUBLE_EQ(SumSquaredDeviation(a, 2.0), 2.0);
  EXPECT_EQ(CountLessEqual(b, 4.0), 2u);
  std::vector<double> y = b;
  Axpy(2.0, a, y);
  EXPECT_EQ(y, (std::vector<double>{6, -1, 12}));
  EXPECT_EQ(Dot({}, {}), 0.0);
}

// Every vector variant against the scalar reference, over lengths that cover
// the remainder loops.
TEST(KernelsTest, VariantsMatchScalar) {
  const std::vector<Isa> isas = VectorIsas();
  if (isas.empty()) GTEST_SKIP() << "no vector ISA on this machine";
  std::mt19937_64 rng(7);
  for (std::size_t n = 0; n < 70; ++n) {
    const auto a = RandomVector(n, rng);
    const auto b = RandomVector(n, rng);
    const auto w = RandomVector(n, rng);
    double abs_ab = 0.0, abs_wab = 0.0, abs_a = 0.0, sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      abs_ab += std::abs(a[i] * b[i]);
      abs_wab += std::abs(w[i] * a[i] * b[i]);
      abs_a += std::abs(a[i]);
      sq += (a[i] - 0.3) * (a[i] - 0.3);
    }
    double dot, dot3, sum, ssd;
    std::size_t count;
    std::vector<double> axpy = b;
    {
      ScopedIsa scope(Isa::kScalar);
      dot = Dot(a, b);
      dot3 = Dot3(w, a, b);
      sum = Sum(a);
      ssd = SumSquaredDeviation(a, 0.3);
      count = CountLessEqual(a, 0.1);
      Axpy(-1.5, a, axpy);
    }
    for (Isa isa : isas) {
      SCOPED_TRACE(std::string(IsaName(isa)) + " n=" + std::to_string(n));
      ScopedIsa scope(isa);
      ASSERT_TRUE(scope.ok());
      EXPECT_NEAR(Dot(a, b), dot, 1e-13 * (abs_ab + 1));
      EXPECT_NEAR(Dot3(w, a, b), dot3, 1e-13 * (abs_wab + 1));
      EXPECT_NEAR(Sum(a), sum, 1e-13 * (abs_a + 1));
      EXPECT_NEAR(SumSquaredDeviation(a, 0.3), ssd, 1e-13 * (sq + 1));
      EXPECT_EQ(CountLessEqual(a, 0.1), count);
      std::vector<double> y = b;
      Axpy(-1.5, a, y);
      for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(y[i], axpy[i], 1e-15);
    }
  }
}

TEST(KernelsTest, CountLessEqualTiesAndInfinities) {
  const std::vector<double> x = {1.0, 1.0, -INFINITY, INFINITY, 0.5, 2.0,
                                 1.0, 1.0, 1.0};
  for (Isa isa : {Isa::kScalar, Isa::kAvx2, Isa::kNeon}) {
    if (!IsaAvailable(isa)) continue;
    ScopedIsa scope(isa);
    EXPECT_EQ(CountLessEqual(x, 1.0), 7u);
    EXPECT_EQ(CountLessEqual(x, INFINITY), 9u);
  }
}

TEST(KernelsTest, MismatchedLengthsThrow) {
  const std::vector<double> a(3), b(4);
  EXPECT_THROW(Dot(a, b), std::invalid_argument);
}

}  // namespace
}  // namespace robustqn::kernels
