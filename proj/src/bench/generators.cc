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

#include "robustqn/bench/generators.h"

#include <cmath>
#include <map>
#include <mutex>
#include <random>
#include <stdexcept>
#include <utility>

#include <Eigen/Eigenvalues>

#include "robustqn/rng.h"

namespace robustqn::bench {
namespace {

constexpr int kMaxTriesPerRow = 1000;
constexpr Eigen::Index kPopulationSample = 200000;
constexpr std::uint64_t kPopulationSeed = 0x5eed;

void CheckArgs(int p, Eigen::Index count) {
  if (p < 1) throw std::invalid_argument("p must be >= 1");
  if (count < 1) throw std::invalid_argument("sample count must be >= 1");
}

// Draws rows of N(0, Sigma) through the Cholesky factor of Sigma.
class CorrelatedNormal {
 public:
  explicit CorrelatedNormal(const Matrix& sigma) : chol_(sigma.llt().matrixL()) {}

  Vector Draw(Rng& rng) {
    Vector z(chol_.rows());
    for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = normal_(rng);
    return chol_ * z;
  }

 private:
  Matrix chol_;
  std::normal_distribution<double> normal_;
};

double Sigmoid(double u) {
  if (u >= 0.0) return 1.0 / (1.0 + std::exp(-u));
  const double e = std::exp(u);
  return e / (1.0 + e);
}

}  // namespace

Matrix ToeplitzCovariance(int p, double rho) {
  if (p < 1) throw std::invalid_argument("p must be >= 1");
  Matrix sigma(p, p);
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < p; ++j) sigma(i, j) = std::pow(rho, std::abs(i - j));
  }
  return sigma;
}

ParamVector DefaultThetaStar(int p) {
  if (p < 1) throw std::invalid_argument("p must be >= 1");
  return ParamVector::Constant(p, 0.5 / std::sqrt(static_cast<double>(p)));
}

SyntheticData GenLogistic(int p, Eigen::Index count, std::uint64_t seed) {
  CheckArgs(p, count);
  Rng rng(seed);
  CorrelatedNormal gen(ToeplitzCovariance(p));
  SyntheticData out;
  out.theta_star = DefaultThetaStar(p);
  out.data.covariates.resize(count, p);
  out.data.responses.resize(count);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (Eigen::Index i = 0; i < count; ++i) {
    const Vector x = gen.Draw(rng);
    out.data.covariates.row(i) = x.transpose();
    out.data.responses[i] = unif(rng) < Sigmoid(x.dot(out.theta_star)) ? 1 : 0;
  }
  return out;
}

SyntheticData GenPoisson(int p, Eigen::Index count, std::uint64_t seed) {
  CheckArgs(p, count);
  Rng rng(seed);
  CorrelatedNormal gen(ToeplitzCovariance(p));
  SyntheticData out;
  out.theta_star = DefaultThetaStar(p);
  out.data.covariates.resize(count, p);
  out.data.responses.resize(count);
  long long proposals = 0;
  for (Eigen::Index i = 0; i < count; ++i) {
    Vector x;
    double u = 0.0;
    int tries = 0;
    do {
      if (++tries > kMaxTriesPerRow) {
        throw std::runtime_error("Poisson covariate rejection did not accept "
                                 "within 1000 tries");
      }
      ++proposals;
      x = gen.Draw(rng);
      u = x.dot(out.theta_star);
    } while (std::abs(u) > 1.0);
    out.data.covariates.row(i) = x.transpose();
    std::poisson_distribution<int> pois(std::exp(u));
    out.data.responses[i] = pois(rng);
  }
  out.acceptance_rate = static_cast<double>(count) / proposals;
  return out;
}

SyntheticData GenQuadratic(int p, Eigen::Index count, std::uint64_t seed) {
  CheckArgs(p, count);
  Rng rng(seed);
  std::normal_distribution<double> normal;
  SyntheticData out;
  out.theta_star = DefaultThetaStar(p);
  out.data.covariates.resize(count, p);
  for (Eigen::Index i = 0; i < count; ++i) {
    for (int l = 0; l < p; ++l) {
      out.data.covariates(i, l) = out.theta_star[l] + normal(rng);
    }
  }
  return out;
}

double PopulationHessianMinEigenvalue(ModelKind kind, int p) {
  if (kind == ModelKind::kQuadratic) return 1.0;
  static std::mutex mu;
  static std::map<std::pair<int, int>, double> cache;
  const std::pair<int, int> key{static_cast<int>(kind), p};
  std::lock_guard<std::mutex> lock(mu);
  if (auto it = cache.find(key); it != cache.end()) return it->second;
  const SyntheticData sample =
      Generate(kind, p, kPopulationSample, kPopulationSeed);
  const HessMatrix h =
      Hessian(ModelSpec{kind, p}, sample.data, sample.theta_star);
  const double lambda =
      Eigen::SelfAdjointEigenSolver<HessMatrix>(h, Eigen::EigenvaluesOnly)
          .eigenvalues()
          .minCoeff();
  cache.emplace(key, lambda);
  return lambda;
}

SyntheticData Generate(ModelKind kind, int p, Eigen::Index count,
                       std::uint64_t seed) {
  switch (kind) {
    case ModelKind::kLogistic:
      return GenLogistic(p, count, seed);
    case ModelKind::kPoisson:
      return GenPoisson(p, count, seed);
    case ModelKind::kQuadratic:
      return GenQuadratic(p, count, seed);
  }
  throw std::invalid_argument("unknown model kind");
}

}  // namespace robustqn::bench
