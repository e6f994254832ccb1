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

#include "robustqn/bench/replications.h"

#include <array>
#include <cmath>
#include <iostream>
#include <optional>
#include <stdexcept>

#include "robustqn/bench/generators.h"
#include "robustqn/cluster.h"
#include "robustqn/rng.h"

namespace robustqn::bench {
namespace {

constexpr std::uint64_t kDataStream = 21;
constexpr std::uint64_t kClusterStream = 22;

struct Prepared {
  SyntheticData synth;
  Cluster cluster;
};

Prepared Prepare(const ExperimentConfig& cfg, int rep) {
  const auto r = static_cast<std::uint64_t>(rep);
  const bool center_data = cfg.variant == Variant::kStandard;
  const Eigen::Index machines = center_data ? cfg.m + 1 : cfg.m;
  SyntheticData synth =
      Generate(cfg.model, cfg.p, machines * cfg.n,
               DeriveSeed(cfg.master_seed, {kDataStream, r}));
  ClusterConfig cc;
  cc.m = cfg.m;
  cc.alpha = cfg.alpha_byz;
  cc.attack = Attack::Scale(cfg.attack_scale);
  cc.central_has_data = center_data;
  Cluster cluster = Cluster::Build(
      synth.data, cc, DeriveSeed(cfg.master_seed, {kClusterStream, r}));
  return {std::move(synth), std::move(cluster)};
}

ProtocolConfig MakeProtocolConfig(const ExperimentConfig& cfg) {
  ProtocolConfig pc;
  pc.K = cfg.K;
  pc.variant = cfg.variant;
  return pc;
}

void Summarize(const std::vector<double>& errors, MrseRow& row) {
  const double count = static_cast<double>(errors.size());
  if (errors.empty()) {
    row.mrse = std::nan("");
    row.stderr_ = std::nan("");
    return;
  }
  double mean = 0.0;
  for (double e : errors) mean += e;
  mean /= count;
  double ss = 0.0;
  for (double e : errors) ss += (e - mean) * (e - mean);
  row.mrse = mean;
  row.stderr_ = errors.size() > 1 ? std::sqrt(ss / (count - 1.0) / count) : 0.0;
}

}  // namespace

ReplicateResult RunReplicate(const ExperimentConfig& cfg, int rep) {
  ValidateConfig(cfg);
  const Prepared prep = Prepare(cfg, rep);
  const ModelSpec model{cfg.model, cfg.p};
  const ProtocolConfig pc = MakeProtocolConfig(cfg);
  ReplicateResult out;
  out.theta_star = prep.synth.theta_star;
  const PrivacyParams privacy =
      cfg.dp_enabled ? RoundPrivacy(cfg) : PrivacyParams{};
  out.dp = RunAlgorithm1(prep.cluster, model, pc, privacy, cfg.dp_enabled);
  if (cfg.dp_enabled) {
    out.qn_nodp =
        RunAlgorithm1(prep.cluster, model, pc, PrivacyParams{}, false).theta_qn;
  } else {
    out.qn_nodp = out.dp.theta_qn;
  }
  return out;
}

MrseReport RunReplications(const ExperimentConfig& cfg, GridKind kind,
                           const std::vector<double>& grid) {
  ValidateConfig(cfg);
  if (grid.empty()) throw std::invalid_argument("empty grid");
  const ModelSpec model{cfg.model, cfg.p};
  const ProtocolConfig pc = MakeProtocolConfig(cfg);

  // errors[g][e] holds the per-replicate errors of estimator e at grid g.
  std::vector<std::array<std::vector<double>, 4>> errors(grid.size());
  MrseReport report;
  std::vector<ExperimentConfig> point_cfgs(grid.size(), cfg);
  for (std::size_t g = 0; g < grid.size(); ++g) {
    if (kind == GridKind::kEpsilon) {
      point_cfgs[g].epsilon_total = grid[g];
    } else {
      point_cfgs[g].m = static_cast<int>(grid[g]);
    }
    ValidateConfig(point_cfgs[g]);
  }

  for (int rep = 0; rep < cfg.reps; ++rep) {
    // Along an epsilon grid the data, cluster and noise-free run are shared.
    std::optional<Prepared> shared;
    std::optional<ParamVector> shared_nodp;
    for (std::size_t g = 0; g < grid.size(); ++g) {
      const ExperimentConfig& pcfg = point_cfgs[g];
      try {
        std::optional<Prepared> local;
        const Prepared* prep = nullptr;
        if (kind == GridKind::kEpsilon) {
          if (!shared) shared.emplace(Prepare(pcfg, rep));
          prep = &*shared;
        } else {
          local.emplace(Prepare(pcfg, rep));
          prep = &*local;
        }
        const ParamVector& star = prep->synth.theta_star;
        StageEstimates est;
        ParamVector nodp;
        if (!pcfg.dp_enabled) {
          est = RunAlgorithm1(prep->cluster, model, pc, PrivacyParams{}, false);
          nodp = est.theta_qn;
        } else {
          if (kind == GridKind::kEpsilon && shared_nodp) {
            nodp = *shared_nodp;
          } else {
            nodp = RunAlgorithm1(prep->cluster, model, pc, PrivacyParams{},
                                 false)
                       .theta_qn;
            if (kind == GridKind::kEpsilon) shared_nodp = nodp;
          }
          est = RunAlgorithm1(prep->cluster, model, pc, RoundPrivacy(pcfg),
                              true);
        }
        errors[g][0].push_back((est.theta_cq - star).norm());
        errors[g][1].push_back((est.theta_os - star).norm());
        errors[g][2].push_back((est.theta_qn - star).norm());
        errors[g][3].push_back((nodp - star).norm());
      } catch (const std::exception& e) {
        ++report.failed;
        std::cerr << "warning: replicate " << rep << " at grid value "
                  << grid[g] << " failed: " << e.what() << "\n";
      }
    }
  }

  for (std::size_t g = 0; g < grid.size(); ++g) {
    for (std::size_t e = 0; e < 4; ++e) {
      MrseRow row;
      row.estimator = kEstimatorNames[e];
      row.epsilon = point_cfgs[g].epsilon_total;
      row.m = point_cfgs[g].m;
      row.n = cfg.n;
      row.p = cfg.p;
      row.alpha = cfg.alpha_byz;
      Summarize(errors[g][e], row);
      report.rows.push_back(row);
    }
  }
  return report;
}

}  // namespace robustqn::bench
