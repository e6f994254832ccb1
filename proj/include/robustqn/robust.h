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

#ifndef ROBUSTQN_ROBUST_H_
#define ROBUSTQN_ROBUST_H_

#include <span>

#include "robustqn/model.h"
#include "robustqn/types.h"

// Robust aggregation of per-machine statistics: the coordinate median and the
// distributed composite quantile (DCQ) estimator, together with the variance
// estimators the DCQ correction needs.

namespace robustqn {

struct DcqConfig {
  int K = 10;
  Vector kappas;  // k / (K + 1), k = 1..K
  Vector deltas;  // standard normal quantiles of kappas
  double denom = 0.0;  // sum_k pdf(deltas[k])
};

// Builds the quantile table for K levels. Throws std::invalid_argument for
// K < 1. The deltas are exactly antisymmetric, and the middle level of an odd
// K is exactly zero.
DcqConfig MakeDcqConfig(int K);

// Median of a non-empty sample; the midpoint of the two central order
// statistics for even sizes.
double Median(std::span<const double> values);

// Coordinate-wise median of the rows of an M x p matrix.
ParamVector CoordMedian(const Matrix& rows);

struct AggregateInput {
  std::span<const double> values;  // one statistic per machine
  double center = 0.0;             // usually Median(values)
  double sigma_hat = 1.0;          // sd of one machine's (scaled) statistic
  double scale = 1.0;              // divides sigma_hat, e.g. sqrt(n)
};

// center - sigma_hat * sum_k sum_j [1(Y_j <= center + sigma_hat delta_k /
// scale) - kappa_k] / (M * scale * denom). Returns center when sigma_hat is 0.
double DcqScalar(const AggregateInput& input, const DcqConfig& cfg);

// DcqScalar on every column of an M x p matrix, centered at the column
// median, with per-column sigma_hats.
ParamVector DcqVector(const Matrix& values, const Vector& sigma_hats,
                      double scale, const DcqConfig& cfg);

// Asymptotic variance inflation of the DCQ relative to the mean:
// sum_{k1,k2} (min(kappa1, kappa2) - kappa1 kappa2) / denom^2.
double DkConstant(const DcqConfig& cfg);

struct SandwichVariance {
  Vector diag;             // clamped sample part, one entry per coordinate
  double noise_add = 0.0;  // n * s^2

  Vector Total() const { return diag.array() + noise_add; }
};

// diag(H0^-1 S H0^-1) at theta on the central shard, where S is the sample
// covariance of the per-sample gradients, plus n s^2.
SandwichVariance EstimateSandwichVariance(const ModelSpec& model,
                                          const Dataset& central,
                                          const ParamVector& theta, double n,
                                          double s);

// Per-coordinate sample variance of the per-sample gradients, plus n s2^2.
Vector GradientEntryVariance(const ModelSpec& model, const Dataset& central,
                             const ParamVector& theta, double n, double s2);

// Per-coordinate sample variance of the per-sample gradient differences
// grad f(X_i, theta_new) - grad f(X_i, theta_old), plus n s4^2.
Vector GradientDifferenceVariance(const ModelSpec& model,
                                  const Dataset& central,
                                  const ParamVector& theta_new,
                                  const ParamVector& theta_old, double n,
                                  double s4);

// Variance of sqrt(n) times the l-th entry of H_j^-1 g_hat, linearized on the
// central shard: sample variance of (H0^-1 hess f_i H0^-1 g_hat)_l, plus
// n s30^2.
Vector H1EntryVariance(const ModelSpec& model, const Dataset& central,
                       const ParamVector& theta, const GradVector& g_hat,
                       double n, double s30);

// As H1EntryVariance for V1' H_j^-1 V1 g_os_hat: sample variance of
// (V1' H0^-1 hess f_i H0^-1 V1 g_os_hat)_l, plus n s50^2.
Vector H3EntryVariance(const ModelSpec& model, const Dataset& central,
                       const ParamVector& theta_cq, const HessMatrix& v1,
                       const GradVector& g_os_hat, double n, double s50);

}  // namespace robustqn

#endif  // ROBUSTQN_ROBUST_H_
