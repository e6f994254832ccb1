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

#include <cmath>
#include <limits>

#include <Eigen/SVD>

namespace robustqn {
namespace {

enum RoundIndex : std::uint64_t {
  kRoundTheta = 1,
  kRoundGrad = 2,
  kRoundNewton = 3,
  kRoundGradDiff = 4,
  kRoundQuasiNewton = 5,
  kRoundGradVar = 6,
};

double SpectralNorm(const Matrix& a) {
  Eigen::JacobiSVD<Matrix> svd(a);
  return svd.singularValues()(0);
}

}  // namespace

BfgsUpdate BfgsInverseUpdate(const HessMatrix& hinv, const ParamVector& step,
                             const GradVector& gdiff, double floor) {
  const Eigen::Index p = hinv.rows();
  if (hinv.cols() != p || step.size() != p || gdiff.size() != p) {
    throw std::invalid_argument("BfgsInverseUpdate: shape mismatch");
  }
  BfgsUpdate out;
  out.state.step = step;
  out.state.gdiff = gdiff;
  const double curvature = step.dot(gdiff);
  if (!(std::abs(curvature) > floor * step.norm() * gdiff.norm())) {
    out.state.v1 = HessMatrix::Identity(p, p);
    out.state.rho1 = 0.0;
    out.state.applied = false;
    out.hinv = hinv;
    return out;
  }
  const double rho = 1.0 / curvature;
  HessMatrix v = HessMatrix::Identity(p, p) - rho * gdiff * step.transpose();
  HessMatrix updated =
      v.transpose() * hinv * v + rho * step * step.transpose();
  out.hinv = 0.5 * (updated + updated.transpose());
  out.state.v1 = std::move(v);
  out.state.rho1 = rho;
  out.state.applied = true;
  return out;
}

Vector QuasiNewtonMessageH3(const HessMatrix& hinv_j, const BfgsState& state,
                            const GradVector& g_os) {
  return state.v1.transpose() * (hinv_j * (state.v1 * g_os));
}

Vector CenterCorrection(const BfgsState& state, const GradVector& g_os) {
  return state.rho1 * state.step * state.step.dot(g_os);
}

Vector QuasiNewtonMessageH2(const HessMatrix& hinv_j, const BfgsState& state,
                            const GradVector& g_os) {
  const HessMatrix full =
      state.v1.transpose() * hinv_j * state.v1 +
      state.rho1 * state.step * state.step.transpose();
  return full * g_os;
}

ProtocolRun::ProtocolRun(const Cluster& cluster, const ModelSpec& model,
                         const ProtocolConfig& cfg,
                         const PrivacyParams& privacy, bool dp_enabled)
    : cluster_(cluster),
      model_(model),
      cfg_(cfg),
      privacy_(privacy),
      dp_enabled_(dp_enabled),
      dcq_(MakeDcqConfig(cfg.K)),
      plan_(privacy, model.p, static_cast<double>(cluster.n()),
            cluster.m() + 1, dp_enabled),
      hinv_cache_(static_cast<std::size_t>(cluster.m()) + 1),
      hinv_cached_(static_cast<std::size_t>(cluster.m()) + 1, false) {
  ValidateSolverOptions(cfg.solver);
  if (unreliable()) {
    if (cluster.central().shard.n() != 0) {
      throw std::invalid_argument(
          "unreliable-center variant needs a data-less center");
    }
  } else if (cluster.central().shard.n() == 0) {
    throw std::invalid_argument("the standard protocol needs central data");
  }
  for (int id : Senders()) {
    ValidateDataset(model_, cluster_.machine(id).shard);
    if (cluster_.machine(id).shard.n() != cluster_.n()) {
      throw std::invalid_argument("shards must have equal size");
    }
  }
}

std::vector<int> ProtocolRun::Senders() const {
  std::vector<int> ids;
  for (int id = unreliable() ? 1 : 0; id <= cluster_.m(); ++id) {
    ids.push_back(id);
  }
  return ids;
}

double ProtocolRun::scale() const {
  return std::sqrt(static_cast<double>(cluster_.n()));
}

Matrix ProtocolRun::Exchange(const std::string& round, int round_index,
                             const std::vector<Vector>& values,
                             const std::vector<double>& noise) {
  const std::vector<int> senders = Senders();
  for (std::size_t i = 0; i < senders.size(); ++i) {
    const Machine& mc = cluster_.machine(senders[i]);
    Rng rng(DeriveSeed(mc.seed, {static_cast<std::uint64_t>(round_index)}));
    Emit(mc, round, values[i], noise[i], rng, transcript_);
  }
  return transcript_.Collect(round, static_cast<int>(senders.size()));
}

ParamVector ProtocolRun::Aggregate(const Matrix& rows,
                                   const Vector& variance) const {
  if (unreliable()) return CoordMedian(rows);
  return DcqVector(rows, variance.cwiseMax(0.0).cwiseSqrt(), scale(), dcq_);
}

double ProtocolRun::RoundFailBound(int gamma_index, bool hessian_side) const {
  const double nu = hessian_side ? privacy_.nu_h : privacy_.nu_g;
  const double alpha = hessian_side ? privacy_.alpha_h : privacy_.alpha_g;
  return cluster_.m() *
         SubExponentialFailBound(privacy_.gammas[gamma_index], model_.p,
                                 static_cast<double>(cluster_.n()), nu, alpha);
}

void ProtocolRun::RecordLedger(const std::string& round, const Vector& s,
                               double fail_bound) {
  LedgerEntry entry;
  entry.round = round;
  entry.s_by_machine = s;
  entry.first_machine = Senders().front();
  if (dp_enabled_) {
    entry.epsilon = privacy_.epsilon;
    entry.delta = privacy_.delta;
    entry.fail_bound = fail_bound;
  } else {
    entry.epsilon = std::numeric_limits<double>::infinity();
    entry.delta = 0.0;
    entry.fail_bound = 0.0;
  }
  ledger_.Record(std::move(entry));
}

const HessMatrix& ProtocolRun::LocalHessianInverse(int machine,
                                                   const ParamVector& theta) {
  const auto idx = static_cast<std::size_t>(machine);
  if (!hinv_cached_[idx]) {
    hinv_cache_[idx] = InverseHessian(
        Hessian(model_, cluster_.machine(machine).shard, theta));
    hinv_cached_[idx] = true;
  }
  return hinv_cache_[idx];
}

void ProtocolRun::Advance(int expected) {
  if (stage_ != expected) {
    throw std::logic_error("protocol stages must run once each, in order");
  }
  ++stage_;
}

InitialStage ProtocolRun::StageInitial() {
  Advance(0);
  const std::vector<int> senders = Senders();
  const auto count = senders.size();
  const double n = static_cast<double>(cluster_.n());
  InitialStage out;

  std::vector<Vector> local(count);
  for (std::size_t i = 0; i < count; ++i) {
    const SolveResult r =
        LocalMEstimate(model_, cluster_.machine(senders[i]).shard,
                       ParamVector::Zero(model_.p), cfg_.solver);
    if (!r.converged) ++out.nonconverged;
    local[i] = r.theta;
  }
  if (2 * out.nonconverged > static_cast<int>(count)) {
    throw ProtocolError("local solver failed on " +
                        std::to_string(out.nonconverged) + " of " +
                        std::to_string(count) + " machines");
  }

  const double s1 = plan_.s1();
  const Matrix rows =
      Exchange("theta", kRoundTheta, local, std::vector<double>(count, s1));
  out.theta_med = CoordMedian(rows);
  if (unreliable()) {
    out.theta_cq = out.theta_med;
  } else {
    const SandwichVariance var = EstimateSandwichVariance(
        model_, cluster_.central().shard, out.theta_med, n, s1);
    out.sigma_hat = var.Total().cwiseSqrt();
    out.theta_cq = DcqVector(rows, out.sigma_hat, scale(), dcq_);
  }
  RecordLedger("theta", Vector::Constant(static_cast<Eigen::Index>(count), s1),
               RoundFailBound(0, false));
  Broadcast("theta_cq", out.theta_cq, transcript_);
  return out;
}

OneStepStage ProtocolRun::StageOneStep(const InitialStage& initial) {
  Advance(1);
  const std::vector<int> senders = Senders();
  const auto count = senders.size();
  const auto mcount = static_cast<Eigen::Index>(count);
  const double n = static_cast<double>(cluster_.n());
  const ParamVector& theta_cq = initial.theta_cq;
  OneStepStage out;

  // Gradients at theta_cq.
  std::vector<Vector> grads(count);
  for (std::size_t i = 0; i < count; ++i) {
    grads[i] = Gradient(model_, cluster_.machine(senders[i]).shard, theta_cq);
  }
  const double s2 = plan_.s2();
  Vector grad_variance;
  if (unreliable()) {
    // Nodes estimate the gradient variance themselves and send it privatized.
    const double s6 = plan_.s6();
    std::vector<Vector> variances(count);
    for (std::size_t i = 0; i < count; ++i) {
      variances[i] = GradientEntryVariance(
          model_, cluster_.machine(senders[i]).shard, theta_cq, n, 0.0);
    }
    const Matrix var_rows = Exchange("grad_var", kRoundGradVar, variances,
                                     std::vector<double>(count, s6));
    grad_variance = CoordMedian(var_rows).cwiseMax(0.0).array() + n * s2 * s2;
    const double log_n = std::log(n);
    const double fail6 = cluster_.m() * 8.0 * model_.p *
                         std::exp(-privacy_.gammas[5] * log_n /
                                  (privacy_.nu_g * privacy_.nu_g));
    RecordLedger("grad_var", Vector::Constant(mcount, s6), fail6);
  } else {
    grad_variance = GradientEntryVariance(model_, cluster_.central().shard,
                                          theta_cq, n, s2);
  }
  const Matrix grad_rows =
      Exchange("grad", kRoundGrad, grads, std::vector<double>(count, s2));
  out.g_cq_hat = DcqVector(grad_rows, grad_variance.cwiseSqrt(), scale(), dcq_);
  RecordLedger("grad", Vector::Constant(mcount, s2), RoundFailBound(1, false));
  Broadcast("g_cq", out.g_cq_hat, transcript_);

  // Newton directions H_j^-1 g_cq.
  std::vector<Vector> newton(count);
  Vector norms(cluster_.m() + 1);
  norms.setZero();
  for (std::size_t i = 0; i < count; ++i) {
    newton[i] = LocalHessianInverse(senders[i], theta_cq) * out.g_cq_hat;
    norms[senders[i]] = newton[i].norm();
  }
  plan_.SetRound3Norms(norms);
  std::vector<double> s3(count);
  Vector s3_vec(mcount);
  for (std::size_t i = 0; i < count; ++i) {
    s3[i] = plan_.s3(senders[i]);
    s3_vec[static_cast<Eigen::Index>(i)] = s3[i];
  }
  const Matrix newton_rows = Exchange("newton", kRoundNewton, newton, s3);
  Vector h1_variance;
  if (!unreliable()) {
    h1_variance = H1EntryVariance(model_, cluster_.central().shard, theta_cq,
                                  out.g_cq_hat, n, s3[0]);
  }
  const ParamVector h1 = Aggregate(newton_rows, h1_variance);
  out.theta_os = theta_cq - h1;
  RecordLedger("newton", s3_vec, RoundFailBound(2, true));
  Broadcast("theta_os", out.theta_os, transcript_);
  return out;
}

QuasiNewtonStage ProtocolRun::StageQuasiNewton(const InitialStage& initial,
                                               const OneStepStage& one_step) {
  Advance(2);
  const std::vector<int> senders = Senders();
  const auto count = senders.size();
  const auto mcount = static_cast<Eigen::Index>(count);
  const double n = static_cast<double>(cluster_.n());
  const ParamVector& theta_cq = initial.theta_cq;
  const ParamVector& theta_os = one_step.theta_os;
  QuasiNewtonStage out;

  // Gradient differences between the two iterates.
  const ParamVector step = theta_os - theta_cq;
  std::vector<Vector> diffs(count);
  for (std::size_t i = 0; i < count; ++i) {
    const Dataset& shard = cluster_.machine(senders[i]).shard;
    diffs[i] = Gradient(model_, shard, theta_os) -
               Gradient(model_, shard, theta_cq);
  }
  plan_.SetRound4Norm(step.norm());
  const double s4 = plan_.s4();
  const Matrix diff_rows = Exchange("grad_diff", kRoundGradDiff, diffs,
                                    std::vector<double>(count, s4));
  Vector diff_variance;
  if (!unreliable()) {
    diff_variance = GradientDifferenceVariance(
        model_, cluster_.central().shard, theta_os, theta_cq, n, s4);
  }
  const GradVector gdiff = Aggregate(diff_rows, diff_variance);
  out.g_os_hat = one_step.g_cq_hat + gdiff;
  RecordLedger("grad_diff", Vector::Constant(mcount, s4),
               RoundFailBound(3, true));
  Broadcast("g_diff", gdiff, transcript_);

  // BFGS-corrected Newton directions. Every machine forms the same V and rho
  // from the broadcast values; only its own inverse Hessian differs.
  const Eigen::Index p = model_.p;
  out.bfgs = BfgsInverseUpdate(HessMatrix::Identity(p, p), step, gdiff,
                               cfg_.curvature_floor)
                 .state;
  std::vector<Vector> messages(count);
  Vector v_hinv_norms = Vector::Zero(cluster_.m() + 1);
  Vector hinv_v_g_norms = Vector::Zero(cluster_.m() + 1);
  const Vector vg = out.bfgs.v1 * out.g_os_hat;
  for (std::size_t i = 0; i < count; ++i) {
    const HessMatrix& hinv = LocalHessianInverse(senders[i], theta_cq);
    messages[i] = QuasiNewtonMessageH3(hinv, out.bfgs, out.g_os_hat);
    v_hinv_norms[senders[i]] = SpectralNorm(out.bfgs.v1 * hinv);
    hinv_v_g_norms[senders[i]] = (hinv * vg).norm();
  }
  plan_.SetRound5Norms(v_hinv_norms, hinv_v_g_norms);
  std::vector<double> s5(count);
  Vector s5_vec(mcount);
  for (std::size_t i = 0; i < count; ++i) {
    s5[i] = plan_.s5(senders[i]);
    s5_vec[static_cast<Eigen::Index>(i)] = s5[i];
  }
  const Matrix qn_rows =
      Exchange("quasi_newton", kRoundQuasiNewton, messages, s5);
  Vector h3_variance;
  if (!unreliable()) {
    h3_variance = H3EntryVariance(model_, cluster_.central().shard, theta_cq,
                                  out.bfgs.v1, out.g_os_hat, n, s5[0]);
  }
  const Vector h2 =
      Aggregate(qn_rows, h3_variance) + CenterCorrection(out.bfgs, out.g_os_hat);
  out.theta_qn = theta_os - h2;
  RecordLedger("quasi_newton", s5_vec, RoundFailBound(4, true));
  return out;
}

StageEstimates RunAlgorithm1(const Cluster& cluster, const ModelSpec& model,
                             const ProtocolConfig& cfg,
                             const PrivacyParams& privacy, bool dp_enabled) {
  ProtocolRun run(cluster, model, cfg, privacy, dp_enabled);
  const InitialStage initial = run.StageInitial();
  const OneStepStage one_step = run.StageOneStep(initial);
  const QuasiNewtonStage qn = run.StageQuasiNewton(initial, one_step);
  StageEstimates out;
  out.theta_cq = initial.theta_cq;
  out.theta_os = one_step.theta_os;
  out.theta_qn = qn.theta_qn;
  out.bfgs = qn.bfgs;
  out.nonconverged = initial.nonconverged;
  out.transcript = run.TakeTranscript();
  out.ledger = run.TakeLedger();
  if (!out.theta_cq.allFinite() || !out.theta_os.allFinite() ||
      !out.theta_qn.allFinite()) {
    throw NumericError("protocol produced a non-finite estimate");
  }
  return out;
}

StageEstimates RunUnreliableCenter(const Cluster& cluster,
                                   const ModelSpec& model,
                                   const ProtocolConfig& cfg,
                                   const PrivacyParams& privacy,
                                   bool dp_enabled) {
  ProtocolConfig variant = cfg;
  variant.variant = Variant::kUnreliableCenter;
  return RunAlgorithm1(cluster, model, variant, privacy, dp_enabled);
}

}  // namespace robustqn
