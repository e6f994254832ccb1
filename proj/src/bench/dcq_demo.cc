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

#include "robustqn/bench/dcq_demo.h"

#include <random>
#include <stdexcept>
#include <vector>

#include "robustqn/kernels.h"
#include "robustqn/rng.h"
#include "robustqn/robust.h"

namespace robustqn::bench {
namespace {

double SampleVariance(const std::vector<double>& v) {
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return ss / static_cast<double>(v.size() - 1);
}

}  // namespace

EfficiencyResult DcqEfficiency(int K, int machines, int reps,
                               std::uint64_t seed) {
  if (machines < 1 || reps < 2) {
    throw std::invalid_argument("need machines >= 1 and reps >= 2");
  }
  const DcqConfig cfg = MakeDcqConfig(K);
  Rng rng(seed);
  std::normal_distribution<double> normal;
  std::vector<double> means, medians, dcqs;
  std::vector<double> y(static_cast<std::size_t>(machines));
  for (int r = 0; r < reps; ++r) {
    for (double& v : y) v = normal(rng);
    const double med = Median(y);
    means.push_back(kernels::Sum(y) / machines);
    medians.push_back(med);
    dcqs.push_back(DcqScalar({y, med, 1.0, 1.0}, cfg));
  }
  EfficiencyResult out;
  out.var_mean = SampleVariance(means);
  out.var_dcq = SampleVariance(dcqs);
  out.var_median = SampleVariance(medians);
  out.ratio_dcq = out.var_mean / out.var_dcq;
  out.ratio_median = out.var_mean / out.var_median;
  out.inv_dk = 1.0 / DkConstant(cfg);
  return out;
}

}  // namespace robustqn::bench
