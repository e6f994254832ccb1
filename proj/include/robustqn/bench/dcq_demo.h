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

#ifndef ROBUSTQN_BENCH_DCQ_DEMO_H_
#define ROBUSTQN_BENCH_DCQ_DEMO_H_

#include <cstdint>

namespace robustqn::bench {

struct EfficiencyResult {
  double var_mean = 0.0;
  double var_dcq = 0.0;
  double var_median = 0.0;
  double ratio_dcq = 0.0;     // var_mean / var_dcq
  double ratio_median = 0.0;  // var_mean / var_median
  double inv_dk = 0.0;        // asymptotic ratio for the DCQ
};

// Draws `reps` samples of `machines` standard normal values and compares the
// spread of the mean, the median and the DCQ (centered at the median,
// sigma_hat = 1, scale = 1).
EfficiencyResult DcqEfficiency(int K, int machines, int reps,
                               std::uint64_t seed);

}  // namespace robustqn::bench

#endif  // ROBUSTQN_BENCH_DCQ_DEMO_H_
