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

#ifndef ROBUSTQN_BENCH_REPLICATIONS_H_
#define ROBUSTQN_BENCH_REPLICATIONS_H_

#include <string>
#include <vector>

#include "robustqn/algorithm.h"
#include "robustqn/bench/config.h"

// Monte Carlo runner for the synthetic studies.

namespace robustqn::bench {

inline constexpr const char* kEstimatorNames[] = {"cq", "os", "qn", "qn_nodp"};

struct MrseRow {
  std::string estimator;
  double epsilon = 0.0;
  int m = 0;
  int n = 0;
  int p = 0;
  double alpha = 0.0;
  double mrse = 0.0;    // mean over replicates of |theta_hat - theta*|
  double stderr_ = 0.0; // standard error of that mean

  bool operator==(const MrseRow&) const = default;
};

struct MrseReport {
  std::vector<MrseRow> rows;
  int failed = 0;  // replicates dropped because the protocol threw
};

enum class GridKind { kEpsilon, kMachines };

struct ReplicateResult {
  StageEstimates dp;       // the configured run
  ParamVector qn_nodp;     // same data and cluster, no noise
  ParamVector theta_star;
};

// One replicate at the configuration in `cfg`. Data and cluster seeds depend
// only on (master_seed, rep), so grid points share their random numbers.
ReplicateResult RunReplicate(const ExperimentConfig& cfg, int rep);

// For each grid value (epsilon_total or m) and each of cfg.reps replicates,
// records the error of theta_cq, theta_os, theta_qn and of the noise-free
// theta_qn. Rows come grid point by grid point, estimators in the order of
// kEstimatorNames.
MrseReport RunReplications(const ExperimentConfig& cfg, GridKind kind,
                           const std::vector<double>& grid);

}  // namespace robustqn::bench

#endif  // ROBUSTQN_BENCH_REPLICATIONS_H_
