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

// Command-line front end: synthetic simulations, MNIST pair classifiers, the
// DCQ efficiency demo and privacy tables.

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "robustqn/algorithm.h"
#include "robustqn/bench/config.h"
#include "robustqn/bench/dcq_demo.h"
#include "robustqn/bench/idx.h"
#include "robustqn/bench/mnist.h"
#include "robustqn/bench/replications.h"
#include "robustqn/bench/report.h"
#include "robustqn/kernels.h"
#include "robustqn/privacy.h"

namespace rq = robustqn;
namespace rb = robustqn::bench;

namespace {

struct CommonFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir = "out";
  bool no_dp = false;
  std::string variant;
};

void AddCommonFlags(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config_path, "key=value config file")
      ->check(CLI::ExistingFile);
  cmd->add_option("--seed", flags.seed, "master seed");
  cmd->add_option("--out", flags.out_dir, "output directory");
  cmd->add_flag("--no-dp", flags.no_dp, "disable the Gaussian mechanism");
  cmd->add_option("--variant", flags.variant, "protocol variant")
      ->check(CLI::IsMember({"standard", "unreliable-center"}));
}

rb::ExperimentConfig ResolveConfig(const CommonFlags& flags,
                                   rb::ExperimentConfig cfg) {
  if (!flags.config_path.empty()) rb::LoadConfigFile(flags.config_path, cfg);
  if (flags.seed) cfg.master_seed = *flags.seed;
  if (flags.no_dp) cfg.dp_enabled = false;
  if (!flags.variant.empty()) rb::ApplyConfigKey(cfg, "variant", flags.variant);
  rb::ValidateConfig(cfg);
  return cfg;
}

std::filesystem::path OutDir(const CommonFlags& flags) {
  std::filesystem::path dir(flags.out_dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::ofstream OpenOut(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

int RunSimulate(const CommonFlags& flags) {
  const rb::ExperimentConfig cfg = ResolveConfig(flags, {});
  const auto dir = OutDir(flags);

  rb::GridKind kind = rb::GridKind::kEpsilon;
  std::vector<double> grid;
  if (!cfg.m_grid.empty()) {
    kind = rb::GridKind::kMachines;
    grid.assign(cfg.m_grid.begin(), cfg.m_grid.end());
  } else if (!cfg.epsilon_grid.empty()) {
    grid = cfg.epsilon_grid;
  } else {
    grid = {cfg.epsilon_total};
  }

  // Ledger and transcript of the first replicate at the base settings.
  const rb::ReplicateResult first = rb::RunReplicate(cfg, 0);
  {
    auto out = OpenOut(dir / "ledger.csv");
    first.dp.ledger.WriteCsv(out);
  }
  {
    auto out = OpenOut(dir / "transcript.csv");
    first.dp.transcript.WriteCsv(out);
  }

  const rb::MrseReport report = rb::RunReplications(cfg, kind, grid);
  rb::WriteMrseCsvFile(report, (dir / "mrse.csv").string());
  rb::EmitSvgFile(report, kind, (dir / "mrse.svg").string());

  std::cout << "model=" << rq::ModelKindName(cfg.model) << " p=" << cfg.p
            << " n=" << cfg.n << " alpha=" << cfg.alpha_byz
            << " reps=" << cfg.reps << " dp=" << (cfg.dp_enabled ? "on" : "off")
            << " isa=" << rq::kernels::IsaName(rq::kernels::ActiveIsa())
            << "\n";
  std::cout << std::left << std::setw(9) << "estimator" << std::setw(10)
            << "epsilon" << std::setw(7) << "m" << std::setw(12) << "mrse"
            << "stderr\n";
  for (const rb::MrseRow& r : report.rows) {
    std::cout << std::setw(9) << r.estimator << std::setw(10) << r.epsilon
              << std::setw(7) << r.m << std::setw(12) << r.mrse << r.stderr_
              << "\n";
  }
  if (report.failed > 0) {
    std::cout << report.failed << " replicate(s) failed and were dropped\n";
  }
  std::cout << "transmitted " << first.dp.transcript.bytes_sent()
            << " uplink bytes per run; ledger totals eps="
            << first.dp.ledger.total_epsilon()
            << " delta=" << first.dp.ledger.total_delta() << "\n";
  std::cout << "wrote " << (dir / "mrse.csv").string() << ", mrse.svg, "
            << "ledger.csv, transcript.csv\n";
  return 0;
}

int RunMnist(const CommonFlags& flags) {
  rb::ExperimentConfig defaults;
  defaults.gammas.fill(0.5);
  defaults.m = 10;
  defaults.attack_scale = 3.0;
  const rb::ExperimentConfig cfg = ResolveConfig(flags, defaults);
  if (cfg.images.empty() || cfg.labels.empty()) {
    std::cerr << "mnist: set images= and labels= in the config file\n";
    return 2;
  }
  const auto dir = OutDir(flags);
  const rb::IdxImages train = rb::LoadIdx(cfg.images, cfg.labels);
  std::optional<rb::IdxImages> test;
  if (!cfg.test_images.empty()) {
    test = rb::LoadIdx(cfg.test_images, cfg.test_labels);
  }
  rb::PreprocessOptions opts;
  if (!cfg.features.empty()) opts.features = cfg.features;
  opts.intercept = cfg.intercept;
  opts.train_size = static_cast<std::size_t>(cfg.train_size);
  opts.seed = cfg.master_seed;
  const rb::PairSplit split = rb::PreprocessPair(
      train, cfg.digit_a, cfg.digit_b, opts, test ? &*test : nullptr);
  const double acc = rb::TrainEvalPair(split, cfg);
  const double global = rb::GlobalAccuracy(split);

  auto out = OpenOut(dir / "mnist.csv");
  out << "digit_a,digit_b,m,epsilon,features,accuracy,global_accuracy\n";
  out << cfg.digit_a << ',' << cfg.digit_b << ',' << cfg.m << ','
      << cfg.epsilon_total << ',' << split.train.covariates.cols() << ','
      << acc << ',' << global << '\n';
  std::cout << cfg.digit_a << " vs " << cfg.digit_b << ": "
            << split.train.n() << " train / " << split.test.n()
            << " test rows, " << split.train.covariates.cols()
            << " features\n"
            << "distributed accuracy " << 100 * acc << "%, global "
            << 100 * global << "%\n";
  return 0;
}

int RunDcqDemo(const CommonFlags& flags, int machines, int reps) {
  const rb::ExperimentConfig cfg = ResolveConfig(flags, {});
  const auto dir = OutDir(flags);
  const rb::EfficiencyResult r =
      rb::DcqEfficiency(cfg.K, machines, reps, cfg.master_seed);
  auto out = OpenOut(dir / "dcq_demo.csv");
  out << "K,machines,reps,var_mean,var_dcq,var_median,ratio_dcq,"
         "ratio_median,inv_dk\n";
  out << cfg.K << ',' << machines << ',' << reps << ',' << r.var_mean << ','
      << r.var_dcq << ',' << r.var_median << ',' << r.ratio_dcq << ','
      << r.ratio_median << ',' << r.inv_dk << '\n';
  std::cout << "K=" << cfg.K << " M=" << machines << " reps=" << reps << "\n"
            << "var(mean)/var(dcq)    = " << r.ratio_dcq << "  (1/D_K = "
            << r.inv_dk << ")\n"
            << "var(mean)/var(median) = " << r.ratio_median << "\n";
  return 0;
}

int RunPrivacyAudit(const CommonFlags& flags) {
  const rb::ExperimentConfig cfg = ResolveConfig(flags, {});
  const auto dir = OutDir(flags);
  const rq::PrivacyParams pp = rb::RoundPrivacy(cfg);
  const double n = cfg.n;
  const int rounds = rb::PrivacyRounds(cfg);

  auto out = OpenOut(dir / "privacy_audit.csv");
  out << "quantity,value\n";
  auto row = [&](const std::string& name, double v) {
    out << name << ',' << std::setprecision(10) << v << '\n';
    std::cout << std::left << std::setw(36) << name << v << "\n";
  };
  row("epsilon_per_round", pp.epsilon);
  row("delta_per_round", pp.delta);
  row("base_sensitivity", pp.delta_base);
  row("s1", rq::NoiseS1(pp, cfg.p, n));
  row("s2", rq::NoiseS2(pp, cfg.p, n));
  row("s3_per_unit_norm", rq::NoiseS3(pp, cfg.p, n, 1.0));
  row("s4_per_unit_norm", rq::NoiseS4(pp, cfg.p, n, 1.0));
  row("s5_per_unit_norms", rq::NoiseS5(pp, cfg.p, n, 1.0, 1.0));
  row("s6", rq::NoiseS6(pp, cfg.p, n));
  row("fail_bound_per_round_gradient",
      cfg.m * rq::SubExponentialFailBound(pp.gammas[0], cfg.p, n, pp.nu_g,
                                          pp.alpha_g));
  row("basic_epsilon_total", rounds * pp.epsilon);
  row("basic_delta_total", rounds * pp.delta);
  const rq::AdvancedComposition adv =
      rq::ComposeAdvanced(rounds, pp.epsilon, pp.delta, pp.delta);
  row("advanced_epsilon_total", adv.epsilon);
  row("advanced_delta_total", adv.delta);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Byzantine-robust, differentially private distributed "
               "M-estimation simulator"};
  app.require_subcommand(1);

  CommonFlags flags;
  auto* simulate = app.add_subcommand("simulate", "synthetic MRSE study");
  auto* mnist = app.add_subcommand("mnist", "two-digit MNIST classifier");
  auto* demo = app.add_subcommand("dcq-demo", "DCQ efficiency Monte Carlo");
  auto* audit =
      app.add_subcommand("privacy-audit", "noise scales and composition");
  int demo_machines = 2001;
  int demo_reps = 5000;
  demo->add_option("--machines", demo_machines, "values per replicate");
  demo->add_option("--reps", demo_reps, "replicates");
  for (auto* cmd : {simulate, mnist, demo, audit}) AddCommonFlags(cmd, flags);

  CLI11_PARSE(app, argc, argv);
  try {
    if (*simulate) return RunSimulate(flags);
    if (*mnist) return RunMnist(flags);
    if (*demo) return RunDcqDemo(flags, demo_machines, demo_reps);
    if (*audit) return RunPrivacyAudit(flags);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
