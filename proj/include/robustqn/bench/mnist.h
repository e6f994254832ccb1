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

#ifndef ROBUSTQN_BENCH_MNIST_H_
#define ROBUSTQN_BENCH_MNIST_H_

#include <cstdint>
#include <optional>
#include <vector>

#include "robustqn/bench/config.h"
#include "robustqn/bench/idx.h"
#include "robustqn/model.h"

// Two-digit logistic classifiers on MNIST-style IDX data.

namespace robustqn::bench {

struct PreprocessOptions {
  std::optional<std::vector<int>> features;  // pixel indices to keep
  bool intercept = false;       // append a constant column after scaling
  std::size_t train_size = 11760;
  double zero_fraction = 0.75;  // drop pixels at least this often zero
  std::uint64_t seed = 0;       // shuffles the pool before splitting
};

struct PairSplit {
  Dataset train;  // responses: 1 for digit_b, 0 for digit_a
  Dataset test;
  std::vector<int> columns;  // pixel index of each covariate column
};

// Keeps the images of digits a and b, splits them into train and test (the
// held-out set, when given, is used as the test split in full), drops
// zero-heavy pixels, restricts to `features` if given, and standardizes every
// column to mean 0 and variance 1 using training statistics only.
PairSplit PreprocessPair(const IdxImages& images, int digit_a, int digit_b,
                         const PreprocessOptions& opts,
                         const IdxImages* held_out = nullptr);

// Share of rows where 1(sigmoid(x' theta) > 1/2) equals the response.
double Accuracy(const Dataset& test, const ParamVector& theta);

// Shards the training split over the cluster described by cfg, runs the
// protocol, and returns the test accuracy of theta_qn.
double TrainEvalPair(const PairSplit& split, const ExperimentConfig& cfg);

// Test accuracy of the single-machine, noise-free fit on the full training
// split.
double GlobalAccuracy(const PairSplit& split);

}  // namespace robustqn::bench

#endif  // ROBUSTQN_BENCH_MNIST_H_
