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

#include "robustqn/bench/mnist.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

#include "robustqn/algorithm.h"
#include "robustqn/cluster.h"
#include "robustqn/rng.h"

namespace robustqn::bench {
namespace {

constexpr std::uint64_t kSplitStream = 11;
constexpr std::uint64_t kClusterStream = 12;

std::vector<std::size_t> PairRows(const IdxImages& images, int a, int b) {
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < images.count(); ++i) {
    const int label = images.labels[i];
    if (label == a || label == b) rows.push_back(i);
  }
  return rows;
}

// Raw pixels (as doubles) of `rows` restricted to `pixels`.
Dataset Extract(const IdxImages& images, const std::vector<std::size_t>& rows,
                const std::vector<int>& pixels, int b) {
  const std::size_t stride = images.pixels_per_image();
  Dataset out;
  out.covariates.resize(static_cast<Eigen::Index>(rows.size()),
                        static_cast<Eigen::Index>(pixels.size()));
  out.responses.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const std::uint8_t* img = images.pixels.data() + rows[r] * stride;
    for (std::size_t c = 0; c < pixels.size(); ++c) {
      out.covariates(static_cast<Eigen::Index>(r),
                     static_cast<Eigen::Index>(c)) = img[pixels[c]];
    }
    out.responses[static_cast<Eigen::Index>(r)] =
        images.labels[rows[r]] == b ? 1.0 : 0.0;
  }
  return out;
}

}  // namespace

PairSplit PreprocessPair(const IdxImages& images, int digit_a, int digit_b,
                         const PreprocessOptions& opts,
                         const IdxImages* held_out) {
  if (digit_a < 0 || digit_a > 9 || digit_b < 0 || digit_b > 9 ||
      digit_a == digit_b) {
    throw std::invalid_argument("digits must be distinct and in 0..9");
  }
  const int stride = static_cast<int>(images.pixels_per_image());
  if (held_out && static_cast<int>(held_out->pixels_per_image()) != stride) {
    throw std::invalid_argument("held-out images have a different shape");
  }
  std::vector<std::size_t> pool = PairRows(images, digit_a, digit_b);
  for (int digit : {digit_a, digit_b}) {
    if (std::none_of(pool.begin(), pool.end(), [&](std::size_t i) {
          return images.labels[i] == digit;
        })) {
      throw std::invalid_argument("no images of digit " +
                                  std::to_string(digit));
    }
  }
  Rng rng(DeriveSeed(opts.seed, {kSplitStream}));
  std::shuffle(pool.begin(), pool.end(), rng);

  std::vector<std::size_t> train_rows;
  std::vector<std::size_t> test_rows;
  if (held_out) {
    if (pool.size() < opts.train_size) {
      throw std::invalid_argument("not enough images for the training split");
    }
    train_rows.assign(pool.begin(), pool.begin() + opts.train_size);
    test_rows = PairRows(*held_out, digit_a, digit_b);
  } else {
    if (pool.size() <= opts.train_size) {
      throw std::invalid_argument(
          "train_size leaves no test images; supply a held-out set");
    }
    train_rows.assign(pool.begin(), pool.begin() + opts.train_size);
    test_rows.assign(pool.begin() + opts.train_size, pool.end());
  }
  if (test_rows.empty()) throw std::invalid_argument("empty test split");

  std::vector<int> all(static_cast<std::size_t>(stride));
  std::iota(all.begin(), all.end(), 0);
  const Dataset raw = Extract(images, train_rows, all, digit_b);

  // Pixels that survive the zero filter and have spread on the train split.
  std::vector<int> kept;
  const double n_train = static_cast<double>(train_rows.size());
  for (int c = 0; c < stride; ++c) {
    const auto col = raw.covariates.col(c);
    const double zeros = static_cast<double>((col.array() == 0.0).count());
    if (zeros / n_train >= opts.zero_fraction) continue;
    if (col.maxCoeff() == col.minCoeff()) continue;
    kept.push_back(c);
  }
  if (opts.features) {
    for (int f : *opts.features) {
      if (!std::binary_search(kept.begin(), kept.end(), f)) {
        throw std::invalid_argument("feature pixel " + std::to_string(f) +
                                    " was removed by the zero filter");
      }
    }
    kept = *opts.features;
  }
  if (kept.empty()) throw std::invalid_argument("no usable pixels remain");

  PairSplit out;
  out.columns = kept;
  out.train = Extract(images, train_rows, kept, digit_b);
  out.test = Extract(held_out ? *held_out : images, test_rows, kept, digit_b);
  for (Eigen::Index c = 0; c < out.train.covariates.cols(); ++c) {
    const double mean = out.train.covariates.col(c).mean();
    const double sd = std::sqrt(
        (out.train.covariates.col(c).array() - mean).square().mean());
    out.train.covariates.col(c) =
        (out.train.covariates.col(c).array() - mean) / sd;
    out.test.covariates.col(c) =
        (out.test.covariates.col(c).array() - mean) / sd;
  }
  if (opts.intercept) {
    for (Dataset* d : {&out.train, &out.test}) {
      d->covariates.conservativeResize(Eigen::NoChange,
                                       d->covariates.cols() + 1);
      d->covariates.col(d->covariates.cols() - 1).setOnes();
    }
    out.columns.push_back(-1);
  }
  return out;
}

double Accuracy(const Dataset& test, const ParamVector& theta) {
  if (test.n() == 0) throw std::invalid_argument("empty test set");
  const Vector u = test.covariates * theta;
  Eigen::Index hits = 0;
  for (Eigen::Index i = 0; i < test.n(); ++i) {
    // sigmoid(u) > 1/2 exactly when u > 0.
    const double predicted = u[i] > 0.0 ? 1.0 : 0.0;
    if (predicted == test.responses[i]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(test.n());
}

double TrainEvalPair(const PairSplit& split, const ExperimentConfig& cfg) {
  const int p = static_cast<int>(split.train.covariates.cols());
  ClusterConfig cc;
  cc.m = cfg.m;
  cc.alpha = cfg.alpha_byz;
  cc.attack = Attack::Scale(cfg.attack_scale);
  cc.central_has_data = cfg.variant == Variant::kStandard;
  const Cluster cluster = Cluster::Build(
      split.train, cc, DeriveSeed(cfg.master_seed, {kClusterStream}));
  ProtocolConfig pc;
  pc.K = cfg.K;
  pc.variant = cfg.variant;
  const ModelSpec model{ModelKind::kLogistic, p};
  ExperimentConfig resolved = cfg;
  if (!resolved.lambda_s) {
    // No population to consult; use the training-set Hessian at the
    // single-machine fit.
    const SolveResult fit =
        LocalMEstimate(model, split.train, ParamVector::Zero(p));
    resolved.lambda_s =
        Eigen::SelfAdjointEigenSolver<HessMatrix>(
            Hessian(model, split.train, fit.theta), Eigen::EigenvaluesOnly)
            .eigenvalues()
            .minCoeff();
  }
  const PrivacyParams privacy =
      cfg.dp_enabled ? RoundPrivacy(resolved) : PrivacyParams{};
  const StageEstimates est =
      RunAlgorithm1(cluster, model, pc, privacy, cfg.dp_enabled);
  return Accuracy(split.test, est.theta_qn);
}

double GlobalAccuracy(const PairSplit& split) {
  const int p = static_cast<int>(split.train.covariates.cols());
  const SolveResult fit =
      LocalMEstimate(ModelSpec{ModelKind::kLogistic, p}, split.train,
                     ParamVector::Zero(p));
  return Accuracy(split.test, fit.theta);
}

}  // namespace robustqn::bench
