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

#ifndef ROBUSTQN_BENCH_GENERATORS_H_
#define ROBUSTQN_BENCH_GENERATORS_H_

#include <cstdint>

#include "robustqn/model.h"
#include "robustqn/types.h"

// Synthetic data for the simulation studies.

namespace robustqn::bench {

struct SyntheticData {
  Dataset data;
  ParamVector theta_star;
  double acceptance_rate = 1.0;  // fraction of accepted covariate proposals
};

// Sigma_ij = rho^|i - j|.
Matrix ToeplitzCovariance(int p, double rho = 0.6);

// p^-1/2 (1/2, ..., 1/2), so |theta*| = 1/2 for every p.
ParamVector DefaultThetaStar(int p);

// X ~ N(0, Toeplitz), y ~ Bernoulli(sigmoid(x' theta*)).
SyntheticData GenLogistic(int p, Eigen::Index count, std::uint64_t seed);

// X ~ N(0, Toeplitz) redrawn until |x' theta*| <= 1 (at most 1000 tries per
// row, after which std::runtime_error), y ~ Poisson(exp(x' theta*)).
SyntheticData GenPoisson(int p, Eigen::Index count, std::uint64_t seed);

// X ~ N(theta*, I), no responses.
SyntheticData GenQuadratic(int p, Eigen::Index count, std::uint64_t seed);

// Smallest eigenvalue of the population Hessian E[hess f(X, theta*)] of the
// generator above, estimated from a fixed-seed sample of 200000 rows (exact
// for the quadratic model). Cached per (kind, p).
double PopulationHessianMinEigenvalue(ModelKind kind, int p);

SyntheticData Generate(ModelKind kind, int p, Eigen::Index count,
                       std::uint64_t seed);

}  // namespace robustqn::bench

#endif  // ROBUSTQN_BENCH_GENERATORS_H_
