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

#ifndef ROBUSTQN_MODEL_H_
#define ROBUSTQN_MODEL_H_

#include <optional>
#include <string_view>

#include "robustqn/types.h"

// Convex losses for M-estimation and a damped Newton solver.
//
// All quantities are averages over the local samples: F(theta) is
// (1/n) sum_i f(X_i, theta), and likewise for the gradient and Hessian.
//
//   Logistic:  f = log(1 + exp(x'theta)) - y x'theta
//   Poisson:   f = exp(x'theta) - y x'theta
//   Quadratic: f = |x - theta|^2 / 2          (no responses)
//
// Everything here is a pure function of its arguments.

namespace robustqn {

enum class ModelKind { kLogistic, kPoisson, kQuadratic };

std::string_view ModelKindName(ModelKind kind);
std::optional<ModelKind> ParseModelKind(std::string_view name);

struct ModelSpec {
  ModelKind kind = ModelKind::kLogistic;
  int p = 1;
};

struct Dataset {
  Matrix covariates;  // n x p
  Vector responses;   // length n, empty for the quadratic model

  Eigen::Index n() const { return covariates.rows(); }
};

// Throws std::invalid_argument when the dataset does not fit the model:
// wrong covariate width, response length, non-binary logistic responses, or
// negative / non-integer Poisson counts.
void ValidateDataset(const ModelSpec& model, const Dataset& data);

double LossValue(const ModelSpec& model, const Dataset& data,
                 const ParamVector& theta);

GradVector Gradient(const ModelSpec& model, const Dataset& data,
                    const ParamVector& theta);

HessMatrix Hessian(const ModelSpec& model, const Dataset& data,
                   const ParamVector& theta);

// n x p matrix whose row i is grad f(X_i, theta). The row mean equals
// Gradient().
Matrix PerSampleGradients(const ModelSpec& model, const Dataset& data,
                          const ParamVector& theta);

// n x p matrix whose row i is (left * hess f(X_i, theta) * right)'.
// `left` is p x p, `right` has length p. Used by the variance estimators for
// the Newton-direction messages.
Matrix PerSampleHessianProducts(const ModelSpec& model, const Dataset& data,
                                const ParamVector& theta, const Matrix& left,
                                const Vector& right);

// Linear solves against a Hessian. A symmetric LDLT factorization is tried
// first; if it fails, is not positive, or its reciprocal condition estimate
// is below 1e-12, a ridge of 1e-8 * trace(H) / p is added and the
// factorization retried once. Throws NumericError if that also fails.
struct HessianSolve {
  Matrix solution;
  bool ridged = false;
};
HessianSolve SolveHessian(const HessMatrix& hessian, const Matrix& rhs);
HessMatrix InverseHessian(const HessMatrix& hessian);

struct SolverOptions {
  double tol = 1e-8;      // stop once |gradient| <= tol
  int max_iter = 100;
  double damping = 0.5;   // step shrink factor while the loss increases
};

void ValidateSolverOptions(const SolverOptions& opts);

struct SolveResult {
  ParamVector theta;
  int iterations = 0;
  bool converged = false;
  double gradient_norm = 0.0;
};

// Damped Newton iteration for argmin F(theta). Each step is shrunk by
// `damping` (at most 30 times) until the loss does not increase; if no
// admissible step is found the result is returned with converged = false.
// For the quadratic model the minimizer is the sample mean, returned after a
// single step.
SolveResult LocalMEstimate(const ModelSpec& model, const Dataset& data,
                           const ParamVector& theta0,
                           const SolverOptions& opts = {});

}  // namespace robustqn

#endif  // ROBUSTQN_MODEL_H_
