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

#include "robustqn/algorithm.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <vector>

#include <Eigen/Eigenvalues>
#include <boost/math/special_functions/erf.hpp>
#include <gtest/gtest.h>

#include "robustqn/bench/generators.h"

namespace robustqn {
namespace {

Matrix RandomSpd(int p, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Matrix a(p, p);
  for (double& x : a.reshaped()) x = normal(rng);
  return a * a.transpose() / p + Matrix::Identity(p, p);
}

Vector RandomVec(int p, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Vector v(p);
  for (double& x : v) x = normal(rng);
  return v;
}

TEST(BfgsTest, HandExample) {
  Vector step(2), gdiff(2);
  step << 1, 0;
  gdiff << 2, 0;
  const BfgsUpdate u = BfgsInverseUpdate(Matrix::Identity(2, 2), step, gdiff);
  ASSERT_TRUE(u.state.applied);
  EXPECT_DOUBLE_EQ(u.state.rho1, 0.5);
  Matrix v(2, 2);
  v << 0, 0, 0, 1;
  EXPECT_TRUE(u.state.v1.isApprox(v));
  Matrix expected(2, 2);
  expected << 0.5, 0, 0, 1;
  EXPECT_TRUE(u.hinv.isApprox(expected));
  EXPECT_TRUE((u.hinv * gdiff).isApprox(step));
}

TEST(BfgsTest, SecantSymmetryAndDefiniteness) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    const int p = 2 + trial % 9;
    const Matrix hinv = RandomSpd(p, rng);
    const Vector step = RandomVec(p, rng);
    const Vector gdiff = RandomSpd(p, rng) * step;
    const BfgsUpdate u = BfgsInverseUpdate(hinv, step, gdiff);
    ASSERT_TRUE(u.state.applied);
    EXPECT_LE((u.hinv * gdiff - step).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LE((u.hinv - u.hinv.transpose()).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_NEAR(u.state.rho1 * step.dot(gdiff), 1.0, 1e-10);
    EXPECT_GT(Eigen::SelfAdjointEigenSolver<Matrix>(u.hinv)
                  .eigenvalues()
                  .minCoeff(),
              0.0);
  }
}

TEST(BfgsTest, IdentityWhenAlreadyCorrect) {
  std::mt19937_64 rng(9);
  const Vector s = RandomVec(4, rng);
  const BfgsUpdate u = BfgsInverseUpdate(Matrix::Identity(4, 4), s, s);
  EXPECT_TRUE((u.hinv * s).isApprox(s, 1e-12));
  EXPECT_TRUE(u.hinv.isApprox(Matrix::Identity(4, 4), 1e-12));
}

TEST(BfgsTest, JointScalingInvariant) {
  std::mt19937_64 rng(10);
  const Matrix hinv = RandomSpd(5, rng);
  const Vector s = RandomVec(5, rng);
  const Vector g = RandomSpd(5, rng) * s;
  const BfgsUpdate a = BfgsInverseUpdate(hinv, s, g);
  const BfgsUpdate b = BfgsInverseUpdate(hinv, 3.5 * s, 3.5 * g);
  EXPECT_TRUE(a.hinv.isApprox(b.hinv, 1e-12));
}

TEST(BfgsTest, CurvatureFloorSkips) {
  Vector s(2), g(2);
  s << 1, 0;
  g << 0, 1;
  const Matrix hinv = Matrix::Identity(2, 2) * 2;
  const BfgsUpdate u = BfgsInverseUpdate(hinv, s, g);
  EXPECT_FALSE(u.state.applied);
  EXPECT_EQ(u.hinv, hinv);
  EXPECT_EQ(u.state.v1, Matrix::Identity(2, 2));
  EXPECT_EQ(u.state.rho1, 0.0);
  const BfgsUpdate zero = BfgsInverseUpdate(hinv, Vector::Zero(2), g);
  EXPECT_FALSE(zero.state.applied);
  EXPECT_THROW(BfgsInverseUpdate(hinv, Vector::Zero(3), g),
               std::invalid_argument);
}

TEST(BfgsTest, SplitIdentity) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 200; ++trial) {
    const int p = 2 + trial % 7;
    const Vector s = RandomVec(p, rng);
    const BfgsState state =
        BfgsInverseUpdate(Matrix::Identity(p, p), s, RandomSpd(p, rng) * s)
            .state;
    const Matrix hinv_j = RandomSpd(p, rng);
    const Vector g = RandomVec(p, rng);
    const Vector noise = RandomVec(p, rng) * 0.1;
    const Vector h2 = QuasiNewtonMessageH2(hinv_j, state, g) + noise;
    const Vector h3 = QuasiNewtonMessageH3(hinv_j, state, g) + noise +
                      CenterCorrection(state, g);
    EXPECT_LE((h2 - h3).cwiseAbs().maxCoeff(), 1e-10);
  }
}

// Plain-loop DCQ used as an oracle.
double DcqOracle(std::vector<double> y, double sigma, double scale, int K) {
  std::vector<double> sorted = y;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t m = sorted.size();
  const double med = m % 2 ? sorted[m / 2]
                           : 0.5 * (sorted[m / 2 - 1] + sorted[m / 2]);
  if (sigma == 0.0) return med;
  double hits = 0.0, denom = 0.0;
  for (int k = 1; k <= K; ++k) {
    const double kappa = k / (K + 1.0);
    const double delta =
        std::sqrt(2.0) * boost::math::erf_inv(2.0 * kappa - 1.0);
    denom += std::exp(-0.5 * delta * delta) / std::sqrt(2 * std::numbers::pi);
    for (double v : y) {
      hits += (v <= med + sigma * delta / scale ? 1.0 : 0.0) - kappa;
    }
  }
  return med - sigma * hits / (m * scale * denom);
}

TEST(AlgorithmTest, SmallQuadraticMatchesHandDcq) {
  // m + 1 = 3 machines with n = 4 samples each, p = 2.
  const bench::SyntheticData data = bench::GenQuadratic(2, 12, 21);
  ClusterConfig cc;
  cc.m = 2;
  cc.alpha = 0.0;
  const Cluster cluster = Cluster::Build(data.data, cc, 5);
  const StageEstimates est =
      RunAlgorithm1(cluster, {ModelKind::kQuadratic, 2}, {}, {}, false);
  const Matrix& c0 = cluster.central().shard.covariates;
  for (int l = 0; l < 2; ++l) {
    std::vector<double> means;
    for (const Machine& mc : cluster.machines()) {
      means.push_back(mc.shard.covariates.col(l).mean());
    }
    const double var = (c0.col(l).array() - c0.col(l).mean()).square().mean();
    const double oracle = DcqOracle(means, std::sqrt(var), 2.0, 10);
    EXPECT_NEAR(est.theta_cq[l], oracle, 1e-10);
    EXPECT_NEAR(est.theta_os[l], oracle, 1e-10);
    EXPECT_NEAR(est.theta_qn[l], oracle, 1e-10);
  }
}

TEST(AlgorithmTest, QuadraticStagesAgreeNoiseFree) {
  const bench::SyntheticData data = bench::GenQuadratic(4, 51 * 40, 3);
  ClusterConfig cc;
  cc.m = 50;
  cc.alpha = 0.0;
  const Cluster cluster = Cluster::Build(data.data, cc, 8);
  const StageEstimates est =
      RunAlgorithm1(cluster, {ModelKind::kQuadratic, 4}, {}, {}, false);
  EXPECT_LE((est.theta_os - est.theta_cq).norm(), 1e-10);
  EXPECT_LE((est.theta_qn - est.theta_cq).norm(), 1e-10);
}

struct Fixture {
  bench::SyntheticData data;
  Cluster cluster;
};

Fixture LogisticSetup(int m, int n, double alpha, std::uint64_t seed,
                    bool central_data = true, int p = 10) {
  bench::SyntheticData data = bench::GenLogistic(
      p, static_cast<Eigen::Index>(central_data ? m + 1 : m) * n, seed);
  ClusterConfig cc;
  cc.m = m;
  cc.alpha = alpha;
  cc.central_has_data = central_data;
  Cluster cluster = Cluster::Build(data.data, cc, seed + 1000);
  return {std::move(data), std::move(cluster)};
}

TEST(AlgorithmTest, TranscriptAndLedgerShape) {
  const Fixture s = LogisticSetup(20, 200, 0.1, 1);
  const PrivacyParams privacy = MakePrivacyParams(6.0, 0.01, 2.0, 0.05);
  const StageEstimates est =
      RunAlgorithm1(s.cluster, {ModelKind::kLogistic, 10}, {}, privacy, true);
  EXPECT_EQ(est.transcript.UplinkRoundCount(), 5);
  EXPECT_EQ(est.transcript.BroadcastCount(), 4);
  EXPECT_EQ(est.transcript.bytes_sent(), 5u * 21 * 10 * 8);
  ASSERT_EQ(est.ledger.entries().size(), 5u);
  EXPECT_NEAR(est.ledger.total_epsilon(), 30.0, 1e-12);
  EXPECT_NEAR(est.ledger.total_delta(), 0.05, 1e-15);
  for (const LedgerEntry& e : est.ledger.entries()) {
    EXPECT_EQ(e.s_by_machine.size(), 21);
    EXPECT_GT(e.s_by_machine.minCoeff(), 0.0);
  }
  EXPECT_TRUE(est.theta_qn.allFinite());
}

TEST(AlgorithmTest, Deterministic) {
  const Fixture s = LogisticSetup(10, 150, 0.1, 2);
  const PrivacyParams privacy = MakePrivacyParams(6.0, 0.01, 2.0, 0.05);
  const StageEstimates a =
      RunAlgorithm1(s.cluster, {ModelKind::kLogistic, 10}, {}, privacy, true);
  const StageEstimates b =
      RunAlgorithm1(s.cluster, {ModelKind::kLogistic, 10}, {}, privacy, true);
  EXPECT_EQ(a.theta_qn, b.theta_qn);
  std::ostringstream ta, tb;
  a.transcript.WriteCsv(ta);
  b.transcript.WriteCsv(tb);
  EXPECT_EQ(ta.str(), tb.str());
}

TEST(AlgorithmTest, DpOffMatchesZeroNoise) {
  const Fixture s = LogisticSetup(10, 150, 0.0, 3);
  const StageEstimates off =
      RunAlgorithm1(s.cluster, {ModelKind::kLogistic, 10}, {}, {}, false);
  for (const LedgerEntry& e : off.ledger.entries()) {
    EXPECT_EQ(e.s_by_machine, Vector::Zero(11));
    EXPECT_TRUE(std::isinf(e.epsilon));
  }
  for (const Message& msg : off.transcript.messages()) {
    EXPECT_EQ(msg.noise_s, 0.0);
  }
}

// Without noise the final estimate should be about as accurate as the pooled
// M-estimator, which sees all the data at once.
TEST(AlgorithmTest, NoiseFreeQuasiNewtonNearPooledFit) {
  const ModelSpec model{ModelKind::kLogistic, 10};
  double err_qn = 0.0, err_pooled = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Fixture s = LogisticSetup(30, 300, 0.0, 40 + seed);
    const StageEstimates est = RunAlgorithm1(s.cluster, model, {}, {}, false);
    const SolveResult pooled =
        LocalMEstimate(model, s.data.data, Vector::Zero(10));
    err_qn += (est.theta_qn - s.data.theta_star).norm();
    err_pooled += (pooled.theta - s.data.theta_star).norm();
  }
  EXPECT_LE(err_qn, 1.2 * err_pooled);
}

// trace(H^-1) at theta* from a large independent sample.
double TraceInverseHessian(int p) {
  const bench::SyntheticData big = bench::GenLogistic(p, 200000, 77);
  const HessMatrix h =
      Hessian({ModelKind::kLogistic, p}, big.data, big.theta_star);
  return h.inverse().trace();
}

TEST(AlgorithmTest, InitialStageRate) {
  const ModelSpec model{ModelKind::kLogistic, 10};
  const double bound = 3.0 * std::sqrt(10.0 / (100.0 * 500.0));
  int inside = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const Fixture clean = LogisticSetup(100, 500, 0.0, 300 + seed);
    ProtocolRun run(clean.cluster, model, {}, {}, false);
    const double e =
        (run.StageInitial().theta_cq - clean.data.theta_star).norm();
    if (e <= bound) ++inside;
  }
  EXPECT_GE(inside, 90);
}

TEST(AlgorithmTest, InitialStageRateAgainstHessianTrace) {
  const ModelSpec model{ModelKind::kLogistic, 10};
  // E|err|^2 is about trace(H^-1) / N divided by the DCQ efficiency (> 0.9).
  const double bound =
      3.0 * std::sqrt(TraceInverseHessian(10) / (0.9 * 101.0 * 500.0));
  int inside = 0;
  double err_clean = 0.0, err_byz = 0.0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const Fixture clean = LogisticSetup(100, 500, 0.0, 300 + seed);
    ProtocolRun run(clean.cluster, model, {}, {}, false);
    const double e = (run.StageInitial().theta_cq - clean.data.theta_star).norm();
    err_clean += e;
    if (e <= bound) ++inside;
    const Fixture byz = LogisticSetup(100, 500, 0.1, 300 + seed);
    ProtocolRun run_byz(byz.cluster, model, {}, {}, false);
    err_byz += (run_byz.StageInitial().theta_cq - byz.data.theta_star).norm();
  }
  EXPECT_GE(inside, 90);
  EXPECT_LE(err_byz, 2.0 * err_clean);
}

TEST(AlgorithmTest, StagesMustRunInOrder) {
  const Fixture s = LogisticSetup(5, 100, 0.0, 5);
  ProtocolRun run(s.cluster, {ModelKind::kLogistic, 10}, {}, {}, false);
  const InitialStage initial = run.StageInitial();
  EXPECT_THROW(run.StageQuasiNewton(initial, {initial.theta_cq, {}}),
               std::logic_error);
}

TEST(AlgorithmTest, AbortsWhenMostSolversFail) {
  // Perfectly separated shards: no finite maximizer.
  Dataset d;
  d.covariates.resize(40, 1);
  d.responses.resize(40);
  for (int i = 0; i < 40; ++i) {
    d.covariates(i, 0) = (i % 2 ? 1.0 : -1.0) * (1 + i);
    d.responses[i] = i % 2;
  }
  ClusterConfig cc;
  cc.m = 3;
  cc.alpha = 0.0;
  const Cluster cluster = Cluster::Build(d, cc, 1);
  ProtocolConfig pc;
  pc.solver.max_iter = 15;
  EXPECT_THROW(RunAlgorithm1(cluster, {ModelKind::kLogistic, 1}, pc, {}, false),
               ProtocolError);
}

TEST(AlgorithmTest, CenterDataRequirement) {
  const Fixture bare = LogisticSetup(5, 100, 0.0, 6, false);
  EXPECT_THROW(ProtocolRun(bare.cluster, {ModelKind::kLogistic, 10}, {}, {},
                           false),
               std::invalid_argument);
  const Fixture full = LogisticSetup(5, 100, 0.0, 6, true);
  ProtocolConfig pc;
  pc.variant = Variant::kUnreliableCenter;
  EXPECT_THROW(ProtocolRun(full.cluster, {ModelKind::kLogistic, 10}, pc, {},
                           false),
               std::invalid_argument);
}

TEST(UnreliableCenterTest, QuadraticInitialIsMedianOfMeans) {
  const bench::SyntheticData data = bench::GenQuadratic(3, 9 * 30, 4);
  ClusterConfig cc;
  cc.m = 9;
  cc.alpha = 0.0;
  cc.central_has_data = false;
  const Cluster cluster = Cluster::Build(data.data, cc, 2);
  const StageEstimates est =
      RunUnreliableCenter(cluster, {ModelKind::kQuadratic, 3}, {}, {}, false);
  Matrix means(9, 3);
  for (int j = 1; j <= 9; ++j) {
    means.row(j - 1) = cluster.machine(j).shard.covariates.colwise().mean();
  }
  for (int l = 0; l < 3; ++l) {
    std::vector<double> col(means.col(l).data(), means.col(l).data() + 9);
    std::nth_element(col.begin(), col.begin() + 4, col.end());
    EXPECT_DOUBLE_EQ(est.theta_cq[l], col[4]);
  }
  EXPECT_TRUE(est.theta_qn.allFinite());
}

TEST(UnreliableCenterTest, SixRoundsFromNodesOnly) {
  const Fixture s = LogisticSetup(20, 200, 0.1, 7, false);
  const PrivacyParams privacy = MakePrivacyParams(5.0, 0.05 / 6, 2.0, 0.05);
  const StageEstimates est = RunUnreliableCenter(
      s.cluster, {ModelKind::kLogistic, 10}, {}, privacy, true);
  EXPECT_EQ(est.transcript.UplinkRoundCount(), 6);
  ASSERT_EQ(est.ledger.entries().size(), 6u);
  EXPECT_NEAR(est.ledger.total_epsilon(), 30.0, 1e-12);
  for (const Message& msg : est.transcript.messages()) {
    if (msg.direction == Direction::kUplink) EXPECT_NE(msg.machine, 0);
  }
  for (const LedgerEntry& e : est.ledger.entries()) {
    EXPECT_EQ(e.first_machine, 1);
    EXPECT_EQ(e.s_by_machine.size(), 20);
  }
}

}  // namespace
}  // namespace robustqn
