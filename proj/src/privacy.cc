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

#include "robustqn/privacy.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <random>
#include <stdexcept>

namespace robustqn {
namespace {

void CheckEpsilonDelta(double epsilon, double delta) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw std::invalid_argument("epsilon must be positive and finite");
  }
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("delta must lie in (0, 1)");
  }
}

void CheckSize(int p, double n) {
  if (p < 1) throw std::invalid_argument("p must be >= 1");
  if (!(n >= 2.0)) throw std::invalid_argument("n must be >= 2");
}

void CheckNorm(double norm) {
  if (!(norm >= 0.0) || !std::isfinite(norm)) {
    throw std::invalid_argument("norm factor must be finite and >= 0");
  }
}

// sqrt(p) log(n) Delta / n, the factor shared by s1..s5.
double CommonFactor(const PrivacyParams& params, int p, double n) {
  CheckSize(p, n);
  return std::sqrt(static_cast<double>(p)) * std::log(n) * params.delta_base /
         n;
}

}  // namespace

double BaseSensitivity(double epsilon, double delta) {
  CheckEpsilonDelta(epsilon, delta);
  return std::sqrt(2.0 * std::log(1.0 / delta)) / epsilon;
}

PrivacyParams MakePrivacyParams(double epsilon, double delta, double gamma,
                                double lambda_s) {
  PrivacyParams params;
  params.epsilon = epsilon;
  params.delta = delta;
  params.delta_base = BaseSensitivity(epsilon, delta);
  params.gammas.fill(gamma);
  params.lambda_s = lambda_s;
  ValidatePrivacyParams(params);
  return params;
}

void ValidatePrivacyParams(const PrivacyParams& params) {
  CheckEpsilonDelta(params.epsilon, params.delta);
  const double expected = BaseSensitivity(params.epsilon, params.delta);
  if (!(std::abs(params.delta_base - expected) <= 1e-12 * (1.0 + expected))) {
    throw std::invalid_argument("delta_base does not match epsilon and delta");
  }
  for (double g : params.gammas) {
    if (!(g > 0.0)) throw std::invalid_argument("gammas must be positive");
  }
  if (!(params.lambda_s > 0.0)) {
    throw std::invalid_argument("lambda_s must be positive");
  }
  if (!(params.nu_g > 0.0 && params.alpha_g > 0.0 && params.nu_h > 0.0 &&
        params.alpha_h > 0.0)) {
    throw std::invalid_argument("nu and alpha parameters must be positive");
  }
}

double GaussSigma(double sensitivity, double epsilon, double delta) {
  CheckEpsilonDelta(epsilon, delta);
  if (!(sensitivity >= 0.0)) {
    throw std::invalid_argument("sensitivity must be >= 0");
  }
  return std::sqrt(2.0 * std::log(1.25 / delta)) * sensitivity / epsilon;
}

double SubExponentialFailBound(double gamma, int p, double n, double nu,
                               double alpha) {
  const double log_n = std::log(n);
  const double a = std::exp(-gamma * gamma * log_n * log_n / (nu * nu));
  const double b = std::exp(-gamma * log_n / alpha);
  return 2.0 * p * std::max(a, b);
}

MeanSensitivity ComputeMeanSensitivity(TailKind tail, double gamma, int p,
                                       double n, double nu, double alpha) {
  CheckSize(p, n);
  if (!(gamma > 0.0 && nu > 0.0 && alpha > 0.0)) {
    throw std::invalid_argument("gamma, nu and alpha must be positive");
  }
  const double log_n = std::log(n);
  const double sp = std::sqrt(static_cast<double>(p));
  MeanSensitivity out;
  if (tail == TailKind::kSubGaussian) {
    out.sensitivity = 2.0 * gamma * sp * std::sqrt(log_n) / n;
    out.fail_bound = 2.0 * p * std::exp(-gamma * gamma * log_n / (nu * nu));
  } else {
    out.sensitivity = 2.0 * gamma * sp * log_n / n;
    out.fail_bound = SubExponentialFailBound(gamma, p, n, nu, alpha);
  }
  return out;
}

double NoiseS1(const PrivacyParams& params, int p, double n) {
  return 2.02 * params.gammas[0] * CommonFactor(params, p, n) /
         params.lambda_s;
}

double NoiseS2(const PrivacyParams& params, int p, double n) {
  return 2.0 * params.gammas[1] * CommonFactor(params, p, n);
}

double NoiseS3(const PrivacyParams& params, int p, double n,
               double hinv_g_norm) {
  CheckNorm(hinv_g_norm);
  return 2.02 * params.gammas[2] * CommonFactor(params, p, n) * hinv_g_norm /
         params.lambda_s;
}

double NoiseS4(const PrivacyParams& params, int p, double n,
               double step_norm) {
  CheckNorm(step_norm);
  return 2.0 * params.gammas[3] * CommonFactor(params, p, n) * step_norm;
}

double NoiseS5(const PrivacyParams& params, int p, double n,
               double v_hinv_norm, double hinv_v_g_norm) {
  CheckNorm(v_hinv_norm);
  CheckNorm(hinv_v_g_norm);
  return 2.02 * params.gammas[4] * CommonFactor(params, p, n) * v_hinv_norm *
         hinv_v_g_norm;
}

double NoiseS6(const PrivacyParams& params, int p, double n) {
  CheckSize(p, n);
  const double pd = static_cast<double>(p);
  return std::numbers::sqrt2 * params.gammas[5] * pd *
         (4.0 * std::log(n) + 1.0) *
         std::sqrt(std::log(1.25 * pd / params.delta)) /
         (n * params.epsilon);
}

NoisePlan::NoisePlan(const PrivacyParams& params, int p, double n,
                     int machines, bool enabled)
    : params_(params), p_(p), n_(n), machines_(machines), enabled_(enabled) {
  CheckSize(p, n);
  if (machines < 1) throw std::invalid_argument("machines must be >= 1");
  if (enabled) ValidatePrivacyParams(params);
}

double NoisePlan::s1() const {
  return enabled_ ? NoiseS1(params_, p_, n_) : 0.0;
}

double NoisePlan::s2() const {
  return enabled_ ? NoiseS2(params_, p_, n_) : 0.0;
}

double NoisePlan::s6() const {
  return enabled_ ? NoiseS6(params_, p_, n_) : 0.0;
}

void NoisePlan::SetRound3Norms(const Vector& hinv_g_norms) {
  if (hinv_g_norms.size() != machines_) {
    throw std::invalid_argument("round 3 needs one norm per machine");
  }
  Vector s(machines_);
  for (int j = 0; j < machines_; ++j) {
    s[j] = enabled_ ? NoiseS3(params_, p_, n_, hinv_g_norms[j]) : 0.0;
  }
  s3_ = std::move(s);
}

void NoisePlan::SetRound4Norm(double step_norm) {
  s4_ = enabled_ ? NoiseS4(params_, p_, n_, step_norm) : 0.0;
}

void NoisePlan::SetRound5Norms(const Vector& v_hinv_norms,
                               const Vector& hinv_v_g_norms) {
  if (v_hinv_norms.size() != machines_ || hinv_v_g_norms.size() != machines_) {
    throw std::invalid_argument("round 5 needs one norm pair per machine");
  }
  Vector s(machines_);
  for (int j = 0; j < machines_; ++j) {
    s[j] = enabled_ ? NoiseS5(params_, p_, n_, v_hinv_norms[j],
                              hinv_v_g_norms[j])
                    : 0.0;
  }
  s5_ = std::move(s);
}

double NoisePlan::s3(int machine) const { return s3_by_machine()[machine]; }

double NoisePlan::s4() const {
  if (!s4_) throw std::logic_error("s4 requested before round 4 norms");
  return *s4_;
}

double NoisePlan::s5(int machine) const { return s5_by_machine()[machine]; }

const Vector& NoisePlan::s3_by_machine() const {
  if (!s3_) throw std::logic_error("s3 requested before round 3 norms");
  return *s3_;
}

const Vector& NoisePlan::s5_by_machine() const {
  if (!s5_) throw std::logic_error("s5 requested before round 5 norms");
  return *s5_;
}

Vector AddGaussianNoise(const Vector& v, double s, Rng& rng) {
  if (!(s >= 0.0)) throw std::invalid_argument("noise scale must be >= 0");
  if (s == 0.0) return v;
  std::normal_distribution<double> normal(0.0, s);
  Vector out = v;
  for (Eigen::Index i = 0; i < out.size(); ++i) out[i] += normal(rng);
  return out;
}

AdvancedComposition ComposeAdvanced(int k, double epsilon, double delta,
                                    double delta_tilde) {
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be > 0");
  if (!(delta >= 0.0 && delta < 1.0)) {
    throw std::invalid_argument("delta must lie in [0, 1)");
  }
  if (!(delta_tilde > 0.0 && delta_tilde < 1.0)) {
    throw std::invalid_argument("delta_tilde must lie in (0, 1)");
  }
  const double kd = static_cast<double>(k);
  const double e = std::exp(epsilon);
  const double a = (e - 1.0) * kd * epsilon / (e + 1.0);
  const double basic = kd * epsilon;
  const double second =
      a + epsilon * std::sqrt(2.0 * kd *
                              std::log(std::numbers::e +
                                       std::sqrt(kd * epsilon * epsilon) /
                                           delta_tilde));
  const double third =
      a + epsilon * std::sqrt(2.0 * kd * std::log(1.0 / delta_tilde));
  AdvancedComposition out;
  out.epsilon = std::min({basic, second, third});
  out.delta = 1.0 - std::pow(1.0 - delta, kd) * (1.0 - delta_tilde);
  return out;
}

void PrivacyLedger::Record(LedgerEntry entry) {
  entries_.push_back(std::move(entry));
}

double PrivacyLedger::total_epsilon() const {
  double total = 0.0;
  for (const LedgerEntry& e : entries_) total += e.epsilon;
  return total;
}

double PrivacyLedger::total_delta() const {
  double total = 0.0;
  for (const LedgerEntry& e : entries_) total += e.delta;
  return total;
}

double PrivacyLedger::success_probability() const {
  double fail = 0.0;
  for (const LedgerEntry& e : entries_) fail += e.fail_bound;
  return std::max(0.0, 1.0 - fail);
}

AdvancedComposition PrivacyLedger::Advanced(double delta_tilde) const {
  if (entries_.empty()) return {};
  double eps = 0.0;
  double delta = 0.0;
  for (const LedgerEntry& e : entries_) {
    eps = std::max(eps, e.epsilon);
    delta = std::max(delta, e.delta);
  }
  return ComposeAdvanced(static_cast<int>(entries_.size()), eps, delta,
                         delta_tilde);
}

void PrivacyLedger::WriteCsv(std::ostream& out) const {
  out << "round,machine,s_value,epsilon,delta,fail_bound\n";
  const auto old_precision = out.precision(10);
  for (const LedgerEntry& e : entries_) {
    for (Eigen::Index j = 0; j < e.s_by_machine.size(); ++j) {
      out << e.round << ',' << j + e.first_machine << ',' << e.s_by_machine[j] << ','
          << e.epsilon << ',' << e.delta << ',' << e.fail_bound << '\n';
    }
  }
  out.precision(old_precision);
}

}  // namespace robustqn
