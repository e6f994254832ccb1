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

#include "robustqn/model.h"

#include <cmath>
#include <limits>
#include <string>

#include "robustqn/kernels.h"

namespace robustqn {
namespace {

constexpr int kMaxHalvings = 30;
constexpr double kMinReciprocalCondition = 1e-12;
constexpr double kRidgeFactor = 1e-8;

void CheckShapes(const ModelSpec& model, const Dataset& data,
                 const ParamVector& theta) {
  if (model.p < 1) throw std::invalid_argument("model dimension p must be >= 1");
  if (theta.size() != model.p) {
    throw std::invalid_argument("theta has length " +
                                std::to_string(theta.size()) + ", expected " +
                                std::to_string(model.p));
  }
  if (data.covariates.cols() != model.p) {
    throw std::invalid_argument("covariates have " +
                                std::to_string(data.covariates.cols()) +
                                " columns, expected " + std::to_string(model.p));
  }
  if (data.n() == 0) throw std::invalid_argument("dataset is empty");
  if (model.kind != ModelKind::kQuadratic &&
      data.responses.size() != data.n()) {
    throw std::invalid_argument("response length does not match row count");
  }
}

void CheckFinite(double value, const char* what) {
  if (!std::isfinite(value)) {
    throw NumericError(std::string(what) + ": non-finite value (overflow)");
  }
}

double Sigmoid(double u) {
  if (u >= 0.0) return 1.0 / (1.0 + std::exp(-u));
  const double e = std::exp(u);
  return e / (1.0 + e);
}

// log(1 + exp(u)) without overflow for large u.
double Softplus(double u) {
  if (u > 0.0) return u + std::log1p(std::exp(-u));
  return std::log1p(std::exp(u));
}

// u = X * theta, accumulated column by column.
Vector LinearPredictor(const Dataset& data, const ParamVector& theta) {
  Vector u = Vector::Zero(data.n());
  for (Eigen::Index l = 0; l < data.covariates.cols(); ++l) {
    kernels::Axpy(theta[l], Column(data.covariates, l), AsSpan(u));
  }
  return u;
}

// Per-sample residual d f / d u and curvature d^2 f / d u^2 of a GLM loss.
struct GlmTerms {
  Vector residual;
  Vector weight;
};

GlmTerms ComputeGlmTerms(ModelKind kind, const Dataset& data,
                         const Vector& u) {
  const Eigen::Index n = data.n();
  GlmTerms t{Vector(n), Vector(n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    if (kind == ModelKind::kLogistic) {
      const double s = Sigmoid(u[i]);
      t.residual[i] = s - data.responses[i];
      t.weight[i] = s * (1.0 - s);
    } else {
      const double mu = std::exp(u[i]);
      CheckFinite(mu, "poisson mean");
      t.residual[i] = mu - data.responses[i];
      t.weight[i] = mu;
    }
  }
  return t;
}

}  // namespace

std::string_view ModelKindName(ModelKind kind) {
  switch (kind) {
    case ModelKind::kLogistic:
      return "logistic";
    case ModelKind::kPoisson:
      return "poisson";
    case ModelKind::kQuadratic:
      return "quadratic";
  }
  return "unknown";
}

std::optional<ModelKind> ParseModelKind(std::string_view name) {
  if (name == "logistic") return ModelKind::kLogistic;
  if (name == "poisson") return ModelKind::kPoisson;
  if (name == "quadratic") return ModelKind::kQuadratic;
  return std::nullopt;
}

void ValidateDataset(const ModelSpec& model, const Dataset& data) {
  CheckShapes(model, data, ParamVector::Zero(model.p));
  if (model.kind == ModelKind::kLogistic) {
    for (Eigen::Index i = 0; i < data.n(); ++i) {
      const double y = data.responses[i];
      if (y != 0.0 && y != 1.0) {
        throw std::invalid_argument("logistic responses must be 0 or 1");
      }
    }
  } else if (model.kind == ModelKind::kPoisson) {
    for (Eigen::Index i = 0; i < data.n(); ++i) {
      const double y = data.responses[i];
      if (y < 0.0 || y != std::floor(y)) {
        throw std::invalid_argument(
            "poisson responses must be nonnegative integers");
      }
    }
  }
  if (!data.covariates.allFinite()) {
    throw std::invalid_argument("covariates contain non-finite values");
  }
}

double LossValue(const ModelSpec& model, const Dataset& data,
                 const ParamVector& theta) {
  CheckShapes(model, data, theta);
  const double n = static_cast<double>(data.n());
  double total = 0.0;
  if (model.kind == ModelKind::kQuadratic) {
    for (Eigen::Index l = 0; l < model.p; ++l) {
      total += kernels::SumSquaredDeviation(Column(data.covariates, l),
                                            theta[l]);
    }
    total *= 0.5;
  } else {
    const Vector u = LinearPredictor(data, theta);
    for (Eigen::Index i = 0; i < data.n(); ++i) {
      const double link = model.kind == ModelKind::kLogistic
                              ? Softplus(u[i])
                              : std::exp(u[i]);
      total += link - data.responses[i] * u[i];
    }
  }
  const double loss = total / n;
  CheckFinite(loss, "loss");
  return loss;
}

GradVector Gradient(const ModelSpec& model, const Dataset& data,
                    const ParamVector& theta) {
  CheckShapes(model, data, theta);
  const double n = static_cast<double>(data.n());
  GradVector g(model.p);
  if (model.kind == ModelKind::kQuadratic) {
    for (Eigen::Index l = 0; l < model.p; ++l) {
      g[l] = theta[l] - kernels::Sum(Column(data.covariates, l)) / n;
    }
  } else {
    const GlmTerms t =
        ComputeGlmTerms(model.kind, data, LinearPredictor(data, theta));
    for (Eigen::Index l = 0; l < model.p; ++l) {
      g[l] = kernels::Dot(AsSpan(t.residual), Column(data.covariates, l)) / n;
    }
  }
  if (!g.allFinite()) throw NumericError("gradient: non-finite value");
  return g;
}

HessMatrix Hessian(const ModelSpec& model, const Dataset& data,
                   const ParamVector& theta) {
  CheckShapes(model, data, theta);
  if (model.kind == ModelKind::kQuadratic) {
    return HessMatrix::Identity(model.p, model.p);
  }
  const double n = static_cast<double>(data.n());
  const GlmTerms t =
      ComputeGlmTerms(model.kind, data, LinearPredictor(data, theta));
  HessMatrix h(model.p, model.p);
  for (Eigen::Index a = 0; a < model.p; ++a) {
    for (Eigen::Index b = 0; b <= a; ++b) {
      const double v = kernels::Dot3(AsSpan(t.weight),
                                     Column(data.covariates, a),
                                     Column(data.covariates, b)) /
                       n;
      h(a, b) = v;
      h(b, a) = v;
    }
  }
  if (!h.allFinite()) throw NumericError("hessian: non-finite value");
  return h;
}

Matrix PerSampleGradients(const ModelSpec& model, const Dataset& data,
                          const ParamVector& theta) {
  CheckShapes(model, data, theta);
  Matrix rows(data.n(), model.p);
  if (model.kind == ModelKind::kQuadratic) {
    for (Eigen::Index l = 0; l < model.p; ++l) {
      rows.col(l) = theta[l] - data.covariates.col(l).array();
    }
    return rows;
  }
  const GlmTerms t =
      ComputeGlmTerms(model.kind, data, LinearPredictor(data, theta));
  for (Eigen::Index l = 0; l < model.p; ++l) {
    rows.col(l) = data.covariates.col(l).cwiseProduct(t.residual);
  }
  return rows;
}

Matrix PerSampleHessianProducts(const ModelSpec& model, const Dataset& data,
                                const ParamVector& theta, const Matrix& left,
                                const Vector& right) {
  CheckShapes(model, data, theta);
  if (left.rows() != model.p || left.cols() != model.p ||
      right.size() != model.p) {
    throw std::invalid_argument("PerSampleHessianProducts: shape mismatch");
  }
  if (model.kind == ModelKind::kQuadratic) {
    const Vector row = left * right;
    return row.transpose().replicate(data.n(), 1);
  }
  // hess f_i = w_i x_i x_i', so the product is w_i (x_i' right) (left x_i).
  const GlmTerms t =
      ComputeGlmTerms(model.kind, data, LinearPredictor(data, theta));
  const Vector z = LinearPredictor(data, right);
  const Vector scale = t.weight.cwiseProduct(z);
  Matrix rows = data.covariates * left.transpose();
  rows.array().colwise() *= scale.array();
  return rows;
}

HessianSolve SolveHessian(const HessMatrix& hessian, const Matrix& rhs) {
  if (hessian.rows() != hessian.cols() || hessian.rows() != rhs.rows()) {
    throw std::invalid_argument("SolveHessian: shape mismatch");
  }
  auto try_solve = [&rhs](const HessMatrix& h) -> std::optional<Matrix> {
    Eigen::LDLT<HessMatrix> ldlt(h);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) return std::nullopt;
    // LDLT reports "positive" for semidefinite matrices, so also require a
    // strictly positive pivot and a sane condition estimate.
    if (!(ldlt.vectorD().minCoeff() > 0.0)) return std::nullopt;
    if (!(ldlt.rcond() >= kMinReciprocalCondition)) return std::nullopt;
    Matrix x = ldlt.solve(rhs);
    if (!x.allFinite()) return std::nullopt;
    return x;
  };
  if (auto x = try_solve(hessian)) return {std::move(*x), false};
  const Eigen::Index p = hessian.rows();
  const double ridge = kRidgeFactor * hessian.trace() / static_cast<double>(p);
  if (ridge > 0.0 && std::isfinite(ridge)) {
    const HessMatrix ridged =
        hessian + ridge * HessMatrix::Identity(p, p);
    if (auto x = try_solve(ridged)) return {std::move(*x), true};
  }
  throw NumericError("Hessian is singular even after ridge regularization");
}

HessMatrix InverseHessian(const HessMatrix& hessian) {
  const Eigen::Index p = hessian.rows();
  HessMatrix inv = SolveHessian(hessian, Matrix::Identity(p, p)).solution;
  // Symmetrize away round-off so downstream quadratic forms stay symmetric.
  return 0.5 * (inv + inv.transpose());
}

void ValidateSolverOptions(const SolverOptions& opts) {
  if (!(opts.tol > 0.0)) throw std::invalid_argument("solver tol must be > 0");
  if (opts.max_iter < 1) {
    throw std::invalid_argument("solver max_iter must be >= 1");
  }
  if (!(opts.damping > 0.0 && opts.damping <= 1.0)) {
    throw std::invalid_argument("solver damping must lie in (0, 1]");
  }
}

SolveResult LocalMEstimate(const ModelSpec& model, const Dataset& data,
                           const ParamVector& theta0,
                           const SolverOptions& opts) {
  ValidateSolverOptions(opts);
  CheckShapes(model, data, theta0);

  SolveResult result;
  if (model.kind == ModelKind::kQuadratic) {
    const double n = static_cast<double>(data.n());
    result.theta.resize(model.p);
    for (Eigen::Index l = 0; l < model.p; ++l) {
      result.theta[l] = kernels::Sum(Column(data.covariates, l)) / n;
    }
    result.iterations = 1;
    result.converged = true;
    result.gradient_norm = 0.0;
    return result;
  }

  ParamVector theta = theta0;
  double loss = LossValue(model, data, theta);
  for (int iter = 0; iter < opts.max_iter; ++iter) {
    const GradVector g = Gradient(model, data, theta);
    result.gradient_norm = g.norm();
    if (result.gradient_norm <= opts.tol) {
      result.converged = true;
      break;
    }
    const Vector direction =
        SolveHessian(Hessian(model, data, theta), g).solution;
    double step = 1.0;
    bool accepted = false;
    for (int halving = 0; halving <= kMaxHalvings; ++halving) {
      const ParamVector candidate = theta - step * direction;
      double candidate_loss = std::numeric_limits<double>::infinity();
      try {
        candidate_loss = LossValue(model, data, candidate);
      } catch (const NumericError&) {
        // Overflowing trial points are treated as an increase.
      }
      if (candidate_loss <= loss) {
        theta = candidate;
        loss = candidate_loss;
        accepted = true;
        break;
      }
      step *= opts.damping;
    }
    result.iterations = iter + 1;
    if (!accepted) break;
  }
  if (!result.converged) {
    const double final_norm = Gradient(model, data, theta).norm();
    result.gradient_norm = final_norm;
    result.converged = final_norm <= opts.tol;
  }
  result.theta = std::move(theta);
  return result;
}

}  // namespace robustqn
