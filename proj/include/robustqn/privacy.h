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

#ifndef ROBUSTQN_PRIVACY_H_
#define ROBUSTQN_PRIVACY_H_

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "robustqn/rng.h"
#include "robustqn/types.h"

// Gaussian mechanism, noise scales for each transmitted vector, and budget
// accounting.

namespace robustqn {

// Per-round privacy parameters. delta_base is sqrt(2 log(1/delta)) / epsilon.
// nu_* and alpha_* are sub-exponential tail parameters; they only enter the
// reported failure-probability bounds.
struct PrivacyParams {
  double epsilon = 1.0;
  double delta = 0.01;
  double delta_base = 0.0;
  std::array<double, 6> gammas = {2, 2, 2, 2, 2, 2};
  double lambda_s = 1.0;
  double nu_g = 1.0;
  double alpha_g = 1.0;
  double nu_h = 1.0;
  double alpha_h = 1.0;
};

double BaseSensitivity(double epsilon, double delta);

// Fills delta_base and validates the rest. Throws std::invalid_argument.
PrivacyParams MakePrivacyParams(double epsilon, double delta, double gamma,
                                double lambda_s = 1.0);
void ValidatePrivacyParams(const PrivacyParams& params);

// sqrt(2 log(1.25 / delta)) * sensitivity / epsilon.
double GaussSigma(double sensitivity, double epsilon, double delta);

enum class TailKind { kSubGaussian, kSubExponential };

struct MeanSensitivity {
  double sensitivity = 0.0;
  double fail_bound = 0.0;  // probability the bound does not hold
};

// l2 sensitivity of a p-dimensional sample mean of n mean-zero variables with
// the given tail, valid except on an event of probability fail_bound.
MeanSensitivity ComputeMeanSensitivity(TailKind tail, double gamma, int p,
                                       double n, double nu = 1.0,
                                       double alpha = 1.0);

// 2 p max{n^(-gamma^2 log n / nu^2), n^(-gamma / alpha)}.
double SubExponentialFailBound(double gamma, int p, double n, double nu,
                               double alpha);

// Noise scales of the five protocol rounds and of the variance transmission
// in the unreliable-center variant. Each is evaluated from its closed form;
// the norm factors are machine-local and supplied by the caller.
double NoiseS1(const PrivacyParams& params, int p, double n);
double NoiseS2(const PrivacyParams& params, int p, double n);
double NoiseS3(const PrivacyParams& params, int p, double n,
               double hinv_g_norm);
double NoiseS4(const PrivacyParams& params, int p, double n,
               double step_norm);
double NoiseS5(const PrivacyParams& params, int p, double n,
               double v_hinv_norm, double hinv_v_g_norm);
double NoiseS6(const PrivacyParams& params, int p, double n);

// The realized noise scales of one protocol run. It is filled round by round
// because s3 and s5 depend on quantities that exist only once the earlier
// rounds have finished. Reading a scale before it is set throws
// std::logic_error. With DP disabled every scale is zero.
class NoisePlan {
 public:
  NoisePlan(const PrivacyParams& params, int p, double n, int machines,
            bool enabled);

  bool enabled() const { return enabled_; }
  int machines() const { return machines_; }

  double s1() const;
  double s2() const;
  double s6() const;

  // One norm per machine, indexed by machine id.
  void SetRound3Norms(const Vector& hinv_g_norms);
  void SetRound4Norm(double step_norm);
  void SetRound5Norms(const Vector& v_hinv_norms,
                      const Vector& hinv_v_g_norms);

  double s3(int machine) const;
  double s4() const;
  double s5(int machine) const;
  const Vector& s3_by_machine() const;
  const Vector& s5_by_machine() const;

 private:
  PrivacyParams params_;
  int p_;
  double n_;
  int machines_;
  bool enabled_;
  std::optional<Vector> s3_;
  std::optional<double> s4_;
  std::optional<Vector> s5_;
};

// v + N(0, s^2 I). s = 0 returns v untouched and draws nothing.
Vector AddGaussianNoise(const Vector& v, double s, Rng& rng);

struct AdvancedComposition {
  double epsilon = 0.0;
  double delta = 0.0;
};

// k-fold adaptive composition of (epsilon, delta) mechanisms with slack
// delta_tilde.
AdvancedComposition ComposeAdvanced(int k, double epsilon, double delta,
                                    double delta_tilde);

struct LedgerEntry {
  std::string round;
  Vector s_by_machine;  // realized noise scale of each sending machine
  int first_machine = 0;  // id of s_by_machine[0]
  double epsilon = 0.0;
  double delta = 0.0;
  double fail_bound = 0.0;
};

class PrivacyLedger {
 public:
  void Record(LedgerEntry entry);

  const std::vector<LedgerEntry>& entries() const { return entries_; }
  double total_epsilon() const;
  double total_delta() const;
  // 1 - sum of the per-round failure terms, floored at 0.
  double success_probability() const;
  // Advanced composition of the recorded rounds. Only meaningful when all
  // rounds use the same (epsilon, delta); the largest per-round values are
  // used otherwise.
  AdvancedComposition Advanced(double delta_tilde) const;

  // CSV with header round,machine,s_value,epsilon,delta,fail_bound and one
  // row per (round, machine).
  void WriteCsv(std::ostream& out) const;

 private:
  std::vector<LedgerEntry> entries_;
};

}  // namespace robustqn

#endif  // ROBUSTQN_PRIVACY_H_
