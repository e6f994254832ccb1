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

#include "robustqn/robust.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "robustqn/kernels.h"
#include "robustqn/normal.h"

namespace robustqn {
namespace {

// Column-wise (1/n) sum (x - mean)^2, clamped at zero, plus a constant.
Vector ColumnVariancePlus(const Matrix& rows, double add) {
  const double n = static_cast<double>(rows.rows());
  Vector out(rows.cols());
  for (Eigen::Index l = 0; l < rows.cols(); ++l) {
    const std::span<const double> col = Column(rows, l);
    const double mean = kernels::Sum(col) / n;
    out[l] = std::max(0.0, kernels::SumSquaredDeviation(col, mean) / n) + add;
  }
  return out;
}

void CheckNoiseInputs(double n, double s) {
  if (!(n > 0.0)) throw std::invalid_argument("n must be positive");
  if (!(s >= 0.0)) throw std::invalid_argument("noise scale must be >= 0");
}

}  // namespace

DcqConfig MakeDcqConfig(int K) {
  if (K < 1) throw std::invalid_argument("DCQ needs K >= 1");
  DcqConfig cfg;
  cfg.K = K;
  cfg.kappas.resize(K);
  cfg.deltas.resize(K);
  const double levels = static_cast<double>(K + 1);
  for (int k = 0; k < K; ++k) cfg.kappas[k] = (k + 1) / levels;
  // Fill the lower half and mirror it so the table is exactly antisymmetric.
  for (int k = 0; k < K / 2; ++k) {
    const double d = NormalQuantile(cfg.kappas[k]);
    cfg.deltas[k] = d;
    cfg.deltas[K - 1 - k] = -d;
  }
  if (K % 2 == 1) cfg.deltas[K / 2] = 0.0;
  cfg.denom = 0.0;
  for (int k = 0; k < K; ++k) cfg.denom += NormalPdf(cfg.deltas[k]);
  return cfg;
}

double Median(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("median of empty sample");
  std::vector<double> v(values.begin(), values.end());
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  const double upper = v[mid];
  if (v.size() % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + mid);
  return 0.5 * (lower + upper);
}

ParamVector CoordMedian(const Matrix& rows) {
  if (rows.rows() == 0 || rows.cols() == 0) {
    throw std::invalid_argument("coordinate median of empty input");
  }
  ParamVector out(rows.cols());
  for (Eigen::Index l = 0; l < rows.cols(); ++l) {
    out[l] = Median(Column(rows, l));
  }
  return out;
}

double DcqScalar(const AggregateInput& input, const DcqConfig& cfg) {
  if (input.values.empty()) throw std::invalid_argument("DCQ of empty sample");
  if (!(cfg.denom > 0.0) || cfg.deltas.size() != cfg.K) {
    throw std::invalid_argument("malformed DcqConfig");
  }
  if (!(input.scale > 0.0)) throw std::invalid_argument("scale must be > 0");
  if (!(input.sigma_hat >= 0.0)) {
    throw std::invalid_argument("sigma_hat must be >= 0");
  }
  if (input.sigma_hat == 0.0) return input.center;
  const double step = input.sigma_hat / input.scale;
  double count = 0.0;
  for (int k = 0; k < cfg.K; ++k) {
    count += static_cast<double>(kernels::CountLessEqual(
        input.values, input.center + step * cfg.deltas[k]));
  }
  // sum_k kappa_k = K / 2 exactly.
  const double m = static_cast<double>(input.values.size());
  const double excess = count - m * 0.5 * static_cast<double>(cfg.K);
  return input.center - step * excess / (m * cfg.denom);
}

ParamVector DcqVector(const Matrix& values, const Vector& sigma_hats,
                      double scale, const DcqConfig& cfg) {
  if (sigma_hats.size() != values.cols()) {
    throw std::invalid_argument("DcqVector: sigma_hats length mismatch");
  }
  ParamVector out(values.cols());
  for (Eigen::Index l = 0; l < values.cols(); ++l) {
    const std::span<const double> col = Column(values, l);
    out[l] = DcqScalar({col, Median(col), sigma_hats[l], scale}, cfg);
  }
  return out;
}

double DkConstant(const DcqConfig& cfg) {
  double total = 0.0;
  for (int a = 0; a < cfg.K; ++a) {
    for (int b = 0; b < cfg.K; ++b) {
      const double ka = cfg.kappas[a];
      const double kb = cfg.kappas[b];
      total += std::min(ka, kb) - ka * kb;
    }
  }
  return total / (cfg.denom * cfg.denom);
}

SandwichVariance EstimateSandwichVariance(const ModelSpec& model,
                                          const Dataset& central,
                                          const ParamVector& theta, double n,
                                          double s) {
  CheckNoiseInputs(n, s);
  Matrix g = PerSampleGradients(model, central, theta);
  g.rowwise() -= g.colwise().mean();
  const HessMatrix hinv = InverseHessian(Hessian(model, central, theta));
  // diag(Hinv G'G Hinv) / n_rows = column sums of (G Hinv)^2 / n_rows.
  const Matrix a = g * hinv;
  SandwichVariance out;
  out.diag = (a.array().square().colwise().sum() /
              static_cast<double>(central.n()))
                 .transpose()
                 .cwiseMax(0.0);
  out.noise_add = n * s * s;
  return out;
}

Vector GradientEntryVariance(const ModelSpec& model, const Dataset& central,
                             const ParamVector& theta, double n, double s2) {
  CheckNoiseInputs(n, s2);
  return ColumnVariancePlus(PerSampleGradients(model, central, theta),
                            n * s2 * s2);
}

Vector GradientDifferenceVariance(const ModelSpec& model,
                                  const Dataset& central,
                                  const ParamVector& theta_new,
                                  const ParamVector& theta_old, double n,
                                  double s4) {
  CheckNoiseInputs(n, s4);
  const Matrix diff = PerSampleGradients(model, central, theta_new) -
                      PerSampleGradients(model, central, theta_old);
  return ColumnVariancePlus(diff, n * s4 * s4);
}

Vector H1EntryVariance(const ModelSpec& model, const Dataset& central,
                       const ParamVector& theta, const GradVector& g_hat,
                       double n, double s30) {
  const Eigen::Index p = model.p;
  return H3EntryVariance(model, central, theta, HessMatrix::Identity(p, p),
                         g_hat, n, s30);
}

Vector H3EntryVariance(const ModelSpec& model, const Dataset& central,
                       const ParamVector& theta_cq, const HessMatrix& v1,
                       const GradVector& g_os_hat, double n, double s50) {
  CheckNoiseInputs(n, s50);
  if (g_os_hat.size() != model.p || v1.rows() != model.p ||
      v1.cols() != model.p) {
    throw std::invalid_argument("H3EntryVariance: shape mismatch");
  }
  const HessMatrix hinv = InverseHessian(Hessian(model, central, theta_cq));
  const Matrix left = v1.transpose() * hinv;
  const Vector right = hinv * (v1 * g_os_hat);
  return ColumnVariancePlus(
      PerSampleHessianProducts(model, central, theta_cq, left, right),
      n * s50 * s50);
}

}  // namespace robustqn
