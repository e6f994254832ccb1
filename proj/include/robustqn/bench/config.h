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

#ifndef ROBUSTQN_BENCH_CONFIG_H_
#define ROBUSTQN_BENCH_CONFIG_H_

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "robustqn/algorithm.h"
#include "robustqn/model.h"
#include "robustqn/privacy.h"

namespace robustqn::bench {

// Everything a simulation or MNIST run needs. Loaded from a key=value text
// file whose keys are the field names below; gamma sets all six gammas and
// gamma1..gamma6 set one each. Lists are comma separated.
struct ExperimentConfig {
  ModelKind model = ModelKind::kLogistic;
  int p = 10;
  int m = 100;
  int n = 500;
  double alpha_byz = 0.1;
  double attack_scale = -3.0;
  int K = 10;
  double epsilon_total = 30.0;
  double delta_total = 0.05;
  std::array<double, 6> gammas = {2, 2, 2, 2, 2, 2};
  // Lower bound on the Hessian eigenvalues used by s1 and s3. Unset means
  // auto: the population value for synthetic models, the training-set value
  // for MNIST.
  std::optional<double> lambda_s;
  int reps = 100;
  std::uint64_t master_seed = 20240601;
  bool dp_enabled = true;
  Variant variant = Variant::kStandard;
  std::vector<double> epsilon_grid;  // simulate: sweep epsilon_total
  std::vector<int> m_grid;           // simulate: sweep m instead

  // MNIST pair classifiers.
  std::string images;
  std::string labels;
  std::string test_images;  // optional held-out IDX pair
  std::string test_labels;
  int digit_a = 8;
  int digit_b = 9;
  std::vector<int> features;  // pixel indices, optional
  int train_size = 11760;
  bool intercept = false;
};

// Sets one key. Throws std::invalid_argument for unknown keys or bad values.
void ApplyConfigKey(ExperimentConfig& cfg, std::string_view key,
                    std::string_view value);

// Parses key=value lines; blank lines and lines starting with '#' are
// skipped. Throws std::invalid_argument naming the offending line.
void LoadConfig(std::istream& in, ExperimentConfig& cfg);
void LoadConfigFile(const std::string& path, ExperimentConfig& cfg);

void ValidateConfig(const ExperimentConfig& cfg);

// Number of privatized uplink rounds: 5, or 6 for the unreliable center.
int PrivacyRounds(const ExperimentConfig& cfg);

// Per-round privacy parameters: the total budget split evenly over the
// rounds. An unset lambda_s resolves to PopulationHessianMinEigenvalue.
PrivacyParams RoundPrivacy(const ExperimentConfig& cfg);

}  // namespace robustqn::bench

#endif  // ROBUSTQN_BENCH_CONFIG_H_
