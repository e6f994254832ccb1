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

#ifndef ROBUSTQN_ALGORITHM_H_
#define ROBUSTQN_ALGORITHM_H_

#include <stdexcept>
#include <string>
#include <vector>

#include "robustqn/cluster.h"
#include "robustqn/model.h"
#include "robustqn/privacy.h"
#include "robustqn/robust.h"
#include "robustqn/types.h"

// The three-stage estimator: a robust aggregate of local M-estimators, one
// distributed Newton step, and one distributed BFGS step. Every vector a
// machine sends is privatized with the Gaussian mechanism.
//
// Uplink rounds, in order:
//   theta        local estimates + b1                  -> theta_cq
//   grad         local gradients at theta_cq + b2      -> g_cq
//   newton       H_j^-1 g_cq + b3                      -> theta_os
//   grad_diff    grad F_j(theta_os) - grad F_j(theta_cq) + b4
//   quasi_newton V' H_j^-1 V g_os + b5                 -> theta_qn
// The unreliable-center variant adds grad_var (local gradient variances + b6)
// before the grad round.

namespace robustqn {

// Raised when the protocol cannot proceed, e.g. most local solvers failed.
class ProtocolError : public std::runtime_error {
 public:
  explicit ProtocolError(const std::string& what)
      : std::runtime_error(what) {}
};

enum class Variant { kStandard, kUnreliableCenter };

struct ProtocolConfig {
  int K = 10;
  SolverOptions solver;
  double curvature_floor = 1e-12;
  Variant variant = Variant::kStandard;
};

struct BfgsState {
  double rho1 = 0.0;
  HessMatrix v1;
  ParamVector step;
  GradVector gdiff;
  bool applied = false;  // false when the curvature floor skipped the update
};

struct BfgsUpdate {
  HessMatrix hinv;
  BfgsState state;
};

// BFGS update of an inverse Hessian:
//   hinv' = V' hinv V + rho step step',  rho = 1 / (step' gdiff),
//   V = I - rho gdiff step'.
// Skipped (input returned, V = I, rho = 0) unless
// |step' gdiff| > floor * |step| |gdiff|.
BfgsUpdate BfgsInverseUpdate(const HessMatrix& hinv, const ParamVector& step,
                             const GradVector& gdiff, double floor = 1e-12);

// Messages of the quasi-Newton round. H2 is the direct form
// (V' hinv V + rho s s') g; H3 omits the rank-one term, which the center adds
// back through CenterCorrection.
Vector QuasiNewtonMessageH2(const HessMatrix& hinv_j, const BfgsState& state,
                            const GradVector& g_os);
Vector QuasiNewtonMessageH3(const HessMatrix& hinv_j, const BfgsState& state,
                            const GradVector& g_os);
Vector CenterCorrection(const BfgsState& state, const GradVector& g_os);

struct InitialStage {
  ParamVector theta_cq;
  ParamVector theta_med;
  Vector sigma_hat;  // empty for the variant, which uses the median
  int nonconverged = 0;
};

struct OneStepStage {
  ParamVector theta_os;
  GradVector g_cq_hat;
};

struct QuasiNewtonStage {
  ParamVector theta_qn;
  GradVector g_os_hat;
  BfgsState bfgs;
};

struct StageEstimates {
  ParamVector theta_cq;
  ParamVector theta_os;
  ParamVector theta_qn;
  Transcript transcript;
  PrivacyLedger ledger;
  BfgsState bfgs;
  int nonconverged = 0;
};

// One run of the protocol over a cluster. The stages must be called once
// each, in order (std::logic_error otherwise); each appends to the transcript and ledger. Noise for machine j in
// round r is drawn from a stream derived from the machine's seed and r, so a
// run is a deterministic function of the cluster and configuration.
class ProtocolRun {
 public:
  // `privacy` holds the per-round (epsilon, delta). With dp_enabled false
  // every noise scale is zero and the ledger records epsilon = inf.
  ProtocolRun(const Cluster& cluster, const ModelSpec& model,
              const ProtocolConfig& cfg, const PrivacyParams& privacy,
              bool dp_enabled);

  InitialStage StageInitial();
  OneStepStage StageOneStep(const InitialStage& initial);
  QuasiNewtonStage StageQuasiNewton(const InitialStage& initial,
                                    const OneStepStage& one_step);

  const Transcript& transcript() const { return transcript_; }
  const PrivacyLedger& ledger() const { return ledger_; }
  Transcript TakeTranscript() { return std::move(transcript_); }
  PrivacyLedger TakeLedger() { return std::move(ledger_); }

 private:
  // Throws std::logic_error unless `expected` stages have run.
  void Advance(int expected);
  bool unreliable() const { return cfg_.variant == Variant::kUnreliableCenter; }
  // Machines that hold data and take part in every uplink round.
  std::vector<int> Senders() const;
  double scale() const;
  Matrix Exchange(const std::string& round, int round_index,
                  const std::vector<Vector>& values,
                  const std::vector<double>& noise);
  ParamVector Aggregate(const Matrix& rows, const Vector& variance) const;
  void RecordLedger(const std::string& round, const Vector& s,
                    double fail_bound);
  double RoundFailBound(int gamma_index, bool hessian_side) const;
  const HessMatrix& LocalHessianInverse(int machine, const ParamVector& theta);

  const Cluster& cluster_;
  ModelSpec model_;
  ProtocolConfig cfg_;
  PrivacyParams privacy_;
  bool dp_enabled_;
  DcqConfig dcq_;
  NoisePlan plan_;
  Transcript transcript_;
  PrivacyLedger ledger_;
  std::vector<HessMatrix> hinv_cache_;
  std::vector<bool> hinv_cached_;
  int stage_ = 0;
};

// Runs all three stages.
StageEstimates RunAlgorithm1(const Cluster& cluster, const ModelSpec& model,
                             const ProtocolConfig& cfg,
                             const PrivacyParams& privacy, bool dp_enabled);

// Same, with cfg.variant forced to kUnreliableCenter. The cluster's center
// must hold no data.
StageEstimates RunUnreliableCenter(const Cluster& cluster,
                                   const ModelSpec& model,
                                   const ProtocolConfig& cfg,
                                   const PrivacyParams& privacy,
                                   bool dp_enabled);

}  // namespace robustqn

#endif  // ROBUSTQN_ALGORITHM_H_
