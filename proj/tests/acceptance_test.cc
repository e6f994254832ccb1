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

// Acceptance checks. Prints one PASS/FAIL/SKIP line per criterion and exits
// non-zero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "robustqn/algorithm.h"
#include "robustqn/bench/config.h"
#include "robustqn/bench/dcq_demo.h"
#include "robustqn/bench/generators.h"
#include "robustqn/bench/idx.h"
#include "robustqn/bench/mnist.h"
#include "robustqn/bench/replications.h"
#include "robustqn/normal.h"
#include "robustqn/privacy.h"
#include "robustqn/robust.h"

namespace rq = robustqn;
namespace rb = robustqn::bench;

namespace {

enum class Status { kPass, kFail, kSkip };

struct Outcome {
  Status status = Status::kFail;
  std::string detail;
};

std::string Fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), format, args...);
  return buf;
}

Outcome Judge(bool ok, std::string detail) {
  return {ok ? Status::kPass : Status::kFail, std::move(detail)};
}

double Seconds(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

// Shared between criteria 1 and 2.
std::optional<rb::EfficiencyResult> g_efficiency;

Outcome DcqEfficiency() {
  const auto start = std::chrono::steady_clock::now();
  const rb::EfficiencyResult r = rb::DcqEfficiency(10, 2001, 5000, 20240601);
  const double elapsed = Seconds(start);
  g_efficiency = r;
  const double two_over_pi = 2.0 / std::numbers::pi;
  const bool ok = r.ratio_dcq >= 0.90 && r.ratio_dcq <= 0.99 &&
                  std::abs(r.ratio_median - two_over_pi) <= 0.03 &&
                  elapsed < 120.0;
  return Judge(ok, Fmt("var ratio dcq=%.4f median=%.4f (2/pi=%.4f), %.1fs",
                       r.ratio_dcq, r.ratio_median, two_over_pi, elapsed));
}

Outcome DkConstantCheck() {
  const double d1 = rq::DkConstant(rq::MakeDcqConfig(1));
  const double d200 = rq::DkConstant(rq::MakeDcqConfig(200));
  const double inv10 = 1.0 / rq::DkConstant(rq::MakeDcqConfig(10));
  if (!g_efficiency) return {Status::kFail, "criterion 1 did not run"};
  const double mc = g_efficiency->ratio_dcq;
  const bool ok = std::abs(d1 - std::numbers::pi / 2) <= 1e-9 &&
                  d200 >= 1.045 && d200 <= 1.055 &&
                  std::abs(inv10 - mc) <= 0.02;
  return Judge(ok, Fmt("D_1-pi/2=%.2e D_200=%.5f 1/D_10=%.4f vs MC %.4f", d1 -
                       std::numbers::pi / 2, d200, inv10, mc));
}

// Shared between criteria 3 and 4.
struct EpsilonSweep {
  rb::MrseReport report;
  double seconds = 0.0;
};
std::optional<EpsilonSweep> g_sweep;

const EpsilonSweep& Sweep() {
  if (!g_sweep) {
    rb::ExperimentConfig cfg;  // logistic p=10, m=100, n=500, alpha=0.1
    cfg.reps = 100;
    const auto start = std::chrono::steady_clock::now();
    EpsilonSweep s;
    s.report = rb::RunReplications(cfg, rb::GridKind::kEpsilon, {4, 12, 30});
    s.seconds = Seconds(start);
    g_sweep = std::move(s);
  }
  return *g_sweep;
}

double Mrse(const rb::MrseReport& report, const std::string& name,
            double epsilon) {
  for (const rb::MrseRow& row : report.rows) {
    if (row.estimator == name && row.epsilon == epsilon) return row.mrse;
  }
  return std::nan("");
}

Outcome StageOrdering() {
  const EpsilonSweep& s = Sweep();
  const double cq = Mrse(s.report, "cq", 30), os = Mrse(s.report, "os", 30);
  const double qn = Mrse(s.report, "qn", 30);
  const double base = Mrse(s.report, "qn_nodp", 30);
  const bool ordered = qn <= os && os <= cq;
  const bool near_base = qn <= 1.5 * base;
  // The sweep covers three epsilon values; one point costs at most that.
  const bool fast = s.seconds < 600.0;
  return Judge(ordered && near_base && fast && s.report.failed == 0,
               Fmt("eps=30: cq=%.4f os=%.4f qn=%.4f nodp=%.4f; ordered=%s "
                   "qn/nodp=%.2f (<=1.5); failed reps=%d; %.0fs for 3 points",
                   cq, os, qn, base, ordered ? "yes" : "no", qn / base,
                   s.report.failed, s.seconds));
}

Outcome EpsilonFlattening() {
  const EpsilonSweep& s = Sweep();
  const double q4 = Mrse(s.report, "qn", 4), q12 = Mrse(s.report, "qn", 12);
  const double q30 = Mrse(s.report, "qn", 30);
  const bool ok = q4 > q12 && q12 > q30 && (q12 - q30) < (q4 - q12);
  return Judge(ok, Fmt("qn mrse eps=4:%.4g eps=12:%.4g eps=30:%.4g", q4, q12,
                       q30));
}

Outcome SqrtMRate() {
  rb::ExperimentConfig cfg;
  cfg.model = rq::ModelKind::kQuadratic;
  cfg.dp_enabled = false;
  cfg.alpha_byz = 0.0;
  cfg.n = 200;
  cfg.reps = 200;
  const rb::MrseReport r =
      rb::RunReplications(cfg, rb::GridKind::kMachines, {50, 200});
  double small = 0.0, large = 0.0;
  for (const rb::MrseRow& row : r.rows) {
    if (row.estimator != "qn") continue;
    (row.m == 50 ? small : large) = row.mrse;
  }
  const double ratio = large / small;
  return Judge(ratio >= 0.4 && ratio <= 0.65,
               Fmt("qn mrse m=50:%.5f m=200:%.5f ratio=%.3f", small, large,
                   ratio));
}

Outcome ByzantineRobustness() {
  rb::ExperimentConfig cfg;
  cfg.model = rq::ModelKind::kQuadratic;
  cfg.dp_enabled = false;
  cfg.m = 200;
  cfg.n = 200;
  constexpr int kReps = 50;
  double clean = 0.0, attacked = 0.0, naive = 0.0;
  for (int rep = 0; rep < kReps; ++rep) {
    cfg.alpha_byz = 0.0;
    const rb::ReplicateResult c = rb::RunReplicate(cfg, rep);
    clean += (c.dp.theta_qn - c.theta_star).norm();
    cfg.alpha_byz = 0.1;
    const rb::ReplicateResult a = rb::RunReplicate(cfg, rep);
    attacked += (a.dp.theta_qn - a.theta_star).norm();
    const rq::Matrix sent = a.dp.transcript.Collect("theta", cfg.m + 1);
    const rq::Vector mean = sent.colwise().mean();
    naive += (mean - a.theta_star).norm();
  }
  clean /= kReps;
  attacked /= kReps;
  naive /= kReps;
  return Judge(attacked <= 2.0 * clean && naive >= 5.0 * clean,
               Fmt("mean error alpha=0:%.5f alpha=0.1:%.5f (x%.2f) naive "
                   "mean:%.4f (x%.1f)",
                   clean, attacked, attacked / clean, naive, naive / clean));
}

Outcome BfgsIdentities() {
  std::mt19937_64 rng(4242);
  std::normal_distribution<double> normal;
  auto random_spd = [&](int p) {
    rq::Matrix a(p, p);
    for (double& x : a.reshaped()) x = normal(rng);
    return rq::Matrix(a * a.transpose() / p + rq::Matrix::Identity(p, p));
  };
  auto random_vec = [&](int p) {
    rq::Vector v(p);
    for (double& x : v) x = normal(rng);
    return v;
  };
  double secant = 0.0, split = 0.0;
  int skipped = 0;
  for (int i = 0; i < 1000; ++i) {
    const int p = 2 + i % 19;
    const rq::Matrix hinv = random_spd(p);
    const rq::Vector step = random_vec(p);
    const rq::Vector gdiff = random_spd(p) * step;
    const rq::BfgsUpdate u = rq::BfgsInverseUpdate(hinv, step, gdiff);
    if (!u.state.applied) {
      ++skipped;
      continue;
    }
    secant = std::max(secant, (u.hinv * gdiff - step).cwiseAbs().maxCoeff());
    const rq::Vector g = random_vec(p);
    const rq::Vector noise = 0.1 * random_vec(p);
    const rq::Vector h2 = rq::QuasiNewtonMessageH2(hinv, u.state, g) + noise;
    const rq::Vector h3 = rq::QuasiNewtonMessageH3(hinv, u.state, g) + noise +
                          rq::CenterCorrection(u.state, g);
    split = std::max(split, (h2 - h3).cwiseAbs().maxCoeff());
  }
  return Judge(secant <= 1e-10 && split <= 1e-10 && skipped == 0,
               Fmt("max secant residual %.2e, max split gap %.2e, skipped %d",
                   secant, split, skipped));
}

Outcome PrivacyAccounting() {
  // Worked example: gamma=2, p=10, n=1000, eps=4, delta=0.01, lambda_s=1,
  // against the closed form evaluated here.
  const rq::PrivacyParams ex = rq::MakePrivacyParams(4.0, 0.01, 2.0, 1.0);
  const double closed = 2.02 * 2.0 * std::sqrt(10.0) * std::log(1000.0) *
                        (std::sqrt(2.0 * std::log(100.0)) / 4.0) / 1000.0;
  const double s1 = rq::NoiseS1(ex, 10, 1000.0);
  const bool s1_ok = std::abs(s1 - closed) <= 1e-6;

  rb::ExperimentConfig cfg;
  cfg.reps = 1;
  const rb::ReplicateResult run = rb::RunReplicate(cfg, 0);
  const rq::PrivacyParams round = rb::RoundPrivacy(cfg);
  const bool totals_ok =
      run.dp.ledger.entries().size() == 5 &&
      std::abs(run.dp.ledger.total_epsilon() - 5 * round.epsilon) <= 1e-12 &&
      std::abs(run.dp.ledger.total_delta() - 5 * round.delta) <= 1e-15;

  bool compose_ok = true;
  for (double eps = 0.01; eps <= 0.2 + 1e-12; eps += 0.01) {
    for (double dt : {1e-5, 1e-3, 0.01, 0.1}) {
      compose_ok &=
          rq::ComposeAdvanced(5, eps, 0.01, dt).epsilon <= 5 * eps + 1e-15;
    }
  }

  const double s = run.dp.ledger.entries().front().s_by_machine[0];
  rq::Rng rng(99);
  const rq::Vector noise =
      rq::AddGaussianNoise(rq::Vector::Zero(1000000), s, rng);
  const double mean = noise.mean();
  const double var =
      (noise.array() - mean).square().sum() / (noise.size() - 1.0);
  const bool var_ok = std::abs(var / (s * s) - 1.0) <= 0.005;

  return Judge(s1_ok && totals_ok && compose_ok && var_ok,
               Fmt("s1=%.7f (closed form %.7f); ledger (%.4g, %.4g) vs "
                   "5x(%.4g, %.4g); compose<=basic %s; var/s^2=%.5f",
                   s1, closed, run.dp.ledger.total_epsilon(),
                   run.dp.ledger.total_delta(), round.epsilon, round.delta,
                   compose_ok ? "yes" : "no", var / (s * s)));
}

// Kolmogorov-Smirnov distance between the sample and N(mean, sd^2) with the
// parameters fitted from the sample.
double KsFitted(std::vector<double> x) {
  const double n = static_cast<double>(x.size());
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= n;
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / (n - 1.0));
  std::sort(x.begin(), x.end());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = rq::NormalCdf((x[i] - mean) / sd);
    d = std::max({d, f - i / n, (i + 1) / n - f});
  }
  return d;
}

Outcome EmpiricalNormality() {
  constexpr int kMachines = 2000;
  constexpr int kN = 2000;
  constexpr int kRuns = 100;
  const double critical = 1.6276 / std::sqrt(static_cast<double>(kMachines));
  rb::ExperimentConfig cfg;
  cfg.p = 2;
  cfg.n = kN;
  const rq::PrivacyParams privacy = rb::RoundPrivacy(cfg);
  const rq::NoisePlan plan(privacy, 2, kN, kMachines, true);
  const rq::ModelSpec model{rq::ModelKind::kLogistic, 2};
  int passing = 0;
  double worst = 0.0;
  for (int run = 0; run < kRuns; ++run) {
    const std::uint64_t seed = rq::DeriveSeed(777, {static_cast<std::uint64_t>(run)});
    const rb::SyntheticData data =
        rb::GenLogistic(2, static_cast<Eigen::Index>(kMachines) * kN, seed);
    rq::Rng rng(rq::DeriveSeed(seed, {1}));
    std::vector<double> z0, z1;
    for (int j = 0; j < kMachines; ++j) {
      rq::Dataset shard;
      shard.covariates = data.data.covariates.middleRows(j * kN, kN);
      shard.responses = data.data.responses.segment(j * kN, kN);
      const rq::SolveResult r =
          rq::LocalMEstimate(model, shard, rq::Vector::Zero(2));
      const rq::Vector dp = rq::AddGaussianNoise(r.theta, plan.s1(), rng);
      z0.push_back(std::sqrt(double{kN}) * (dp[0] - data.theta_star[0]));
      z1.push_back(std::sqrt(double{kN}) * (dp[1] - data.theta_star[1]));
    }
    const double d = std::max(KsFitted(z0), KsFitted(z1));
    worst = std::max(worst, d);
    if (d < critical) ++passing;
  }
  return Judge(passing >= 95,
               Fmt("%d/%d runs below the 1%% KS critical value %.4f (s1=%.4g, "
                   "worst D=%.4f)",
                   passing, kRuns, critical, plan.s1(), worst));
}

Outcome MnistPairs() {
  const char* env = std::getenv("ROBUSTQN_MNIST_DIR");
  const std::filesystem::path dir = env ? env : "data/mnist";
  const auto train_img = dir / "train-images-idx3-ubyte";
  const auto train_lbl = dir / "train-labels-idx1-ubyte";
  const auto test_img = dir / "t10k-images-idx3-ubyte";
  const auto test_lbl = dir / "t10k-labels-idx1-ubyte";
  for (const auto& f : {train_img, train_lbl, test_img, test_lbl}) {
    if (!std::filesystem::exists(f)) {
      return {Status::kSkip, "IDX files not found in " + dir.string() +
                                 " (set ROBUSTQN_MNIST_DIR)"};
    }
  }
  const rb::IdxImages train = rb::LoadIdx(train_img, train_lbl);
  const rb::IdxImages test = rb::LoadIdx(test_img, test_lbl);
  struct Pair {
    int a, b;
    double table, global;
  };
  const Pair pairs[] = {{8, 9, 0.8387, 0.8391},
                        {6, 9, 0.8828, 0.8821},
                        {6, 8, 0.8672, 0.8675}};
  bool ok = true;
  std::ostringstream detail;
  for (const Pair& pr : pairs) {
    rb::ExperimentConfig cfg;
    cfg.gammas.fill(0.5);
    cfg.m = 10;
    cfg.attack_scale = 3.0;
    cfg.epsilon_total = 30.0;
    rb::PreprocessOptions opts;
    opts.seed = cfg.master_seed;
    const rb::PairSplit split = rb::PreprocessPair(train, pr.a, pr.b, opts, &test);
    const double acc = rb::TrainEvalPair(split, cfg);
    const double global = rb::GlobalAccuracy(split);
    ok &= std::abs(acc - pr.table) <= 0.015 &&
          std::abs(global - pr.global) <= 0.01;
    detail << pr.a << "v" << pr.b << " " << Fmt("%.2f%%/%.2f%% ", 100 * acc,
                                                100 * global);
  }
  return Judge(ok, detail.str() + "(distributed/global)");
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> checks =
      {{"DCQ efficiency", DcqEfficiency},
       {"D_K constant", DkConstantCheck},
       {"stage ordering", StageOrdering},
       {"epsilon flattening", EpsilonFlattening},
       {"sqrt(m) rate", SqrtMRate},
       {"Byzantine robustness", ByzantineRobustness},
       {"BFGS secant and split identities", BfgsIdentities},
       {"privacy accounting", PrivacyAccounting},
       {"empirical normality", EmpiricalNormality},
       {"MNIST pairs", MnistPairs}};
  int failures = 0;
  for (std::size_t i = 0; i < checks.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = checks[i].second();
    } catch (const std::exception& e) {
      out = {Status::kFail, std::string("exception: ") + e.what()};
    }
    const char* label = out.status == Status::kPass   ? "PASS"
                        : out.status == Status::kFail ? "FAIL"
                                                      : "SKIP";
    if (out.status == Status::kFail) ++failures;
    std::printf("criterion %zu %s: %s - %s [%.1fs]\n", i + 1, label,
                checks[i].first.c_str(), out.detail.c_str(), Seconds(start));
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
