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

#include "robustqn/cluster.h"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>
#include <set>
#include <stdexcept>

#include "robustqn/privacy.h"

namespace robustqn {
namespace {

constexpr std::uint64_t kShardStream = 1;
constexpr std::uint64_t kRoleStream = 2;
constexpr std::uint64_t kMachineStream = 3;

Dataset TakeRows(const Dataset& full, const std::vector<Eigen::Index>& rows) {
  Dataset out;
  out.covariates.resize(static_cast<Eigen::Index>(rows.size()),
                        full.covariates.cols());
  const bool has_y = full.responses.size() > 0;
  if (has_y) out.responses.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    out.covariates.row(r) = full.covariates.row(rows[i]);
    if (has_y) out.responses[r] = full.responses[rows[i]];
  }
  return out;
}

}  // namespace

Vector Attack::Apply(const Vector& outgoing) const {
  switch (kind) {
    case AttackKind::kNone:
      return outgoing;
    case AttackKind::kScale:
      return factor * outgoing;
    case AttackKind::kReplace:
      if (replacement.size() != outgoing.size()) {
        throw std::invalid_argument("replacement vector has wrong length");
      }
      return replacement;
  }
  return outgoing;
}

std::string_view RoleName(Role role) {
  return role == Role::kHonest ? "honest" : "byzantine";
}

ShardResult ShardData(const Dataset& full, int shards, std::uint64_t seed) {
  if (shards < 1) throw std::invalid_argument("need at least one shard");
  const Eigen::Index total = full.n();
  if (total < shards) {
    throw std::invalid_argument("fewer samples than machines");
  }
  const Eigen::Index n = total / shards;
  ShardResult result;
  result.dropped = total - n * shards;
  if (result.dropped > 0) {
    std::cerr << "warning: " << result.dropped << " of " << total
              << " samples do not divide evenly over " << shards
              << " machines and are dropped\n";
  }
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n * shards));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  Rng rng(DeriveSeed(seed, {kShardStream}));
  std::shuffle(order.begin(), order.end(), rng);
  result.shards.reserve(static_cast<std::size_t>(shards));
  for (int s = 0; s < shards; ++s) {
    const auto begin = order.begin() + s * n;
    result.shards.push_back(
        TakeRows(full, std::vector<Eigen::Index>(begin, begin + n)));
  }
  return result;
}

std::vector<int> ChooseByzantine(int m, double alpha, std::uint64_t seed) {
  if (m < 1) throw std::invalid_argument("need at least one node machine");
  if (!(alpha >= 0.0 && alpha < 0.5)) {
    throw std::invalid_argument("Byzantine fraction must lie in [0, 0.5)");
  }
  std::vector<int> ids(static_cast<std::size_t>(m));
  std::iota(ids.begin(), ids.end(), 1);
  Rng rng(DeriveSeed(seed, {kRoleStream}));
  std::shuffle(ids.begin(), ids.end(), rng);
  const auto count = static_cast<std::size_t>(std::floor(alpha * m + 1e-9));
  std::vector<int> chosen(ids.begin(), ids.begin() + count);
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

Cluster Cluster::Build(const Dataset& full, const ClusterConfig& cfg,
                       std::uint64_t seed) {
  const int data_machines = cfg.central_has_data ? cfg.m + 1 : cfg.m;
  ShardResult sharded = ShardData(full, data_machines, seed);
  const std::vector<int> byz = ChooseByzantine(cfg.m, cfg.alpha, seed);

  std::vector<Machine> machines(static_cast<std::size_t>(cfg.m) + 1);
  std::size_t next_shard = 0;
  for (int id = 0; id <= cfg.m; ++id) {
    Machine& mc = machines[static_cast<std::size_t>(id)];
    mc.id = id;
    mc.seed = DeriveSeed(seed, {kMachineStream, static_cast<std::uint64_t>(id)});
    if (id > 0 || cfg.central_has_data) {
      mc.shard = std::move(sharded.shards[next_shard++]);
    } else {
      mc.shard.covariates.resize(0, full.covariates.cols());
    }
    if (std::binary_search(byz.begin(), byz.end(), id)) {
      mc.role = Role::kByzantine;
      mc.attack = cfg.attack;
    }
  }
  return Cluster(std::move(machines));
}

Cluster::Cluster(std::vector<Machine> machines)
    : machines_(std::move(machines)) {
  if (machines_.size() < 2) {
    throw std::invalid_argument("a cluster needs a center and a node");
  }
  for (std::size_t i = 0; i < machines_.size(); ++i) {
    if (machines_[i].id != static_cast<int>(i)) {
      throw std::invalid_argument("machine ids must be 0..m in order");
    }
  }
  if (machines_.front().role != Role::kHonest) {
    throw std::invalid_argument("the central processor must be honest");
  }
}

int Cluster::byzantine_count() const {
  return static_cast<int>(
      std::count_if(machines_.begin(), machines_.end(),
                    [](const Machine& m) { return m.role == Role::kByzantine; }));
}

void Transcript::Record(Message message) {
  if (message.direction == Direction::kUplink) {
    bytes_sent_ += static_cast<std::uint64_t>(message.payload.size()) * 8;
  }
  messages_.push_back(std::move(message));
}

Matrix Transcript::Collect(std::string_view round, int expected) const {
  std::vector<const Message*> found;
  for (const Message& msg : messages_) {
    if (msg.direction == Direction::kUplink && msg.round == round) {
      found.push_back(&msg);
    }
  }
  if (static_cast<int>(found.size()) != expected) {
    throw std::logic_error("round " + std::string(round) + " has " +
                           std::to_string(found.size()) + " senders, expected " +
                           std::to_string(expected));
  }
  std::sort(found.begin(), found.end(),
            [](const Message* a, const Message* b) {
              return a->machine < b->machine;
            });
  for (std::size_t i = 1; i < found.size(); ++i) {
    if (found[i]->machine == found[i - 1]->machine) {
      throw std::logic_error("machine sent twice in round " +
                             std::string(round));
    }
  }
  if (found.empty()) return Matrix(0, 0);
  const Eigen::Index p = found.front()->payload.size();
  Matrix rows(static_cast<Eigen::Index>(found.size()), p);
  for (std::size_t i = 0; i < found.size(); ++i) {
    if (found[i]->payload.size() != p) {
      throw std::logic_error("ragged payloads in round " + std::string(round));
    }
    rows.row(static_cast<Eigen::Index>(i)) = found[i]->payload.transpose();
  }
  return rows;
}

int Transcript::UplinkRoundCount() const {
  std::set<std::string> rounds;
  for (const Message& msg : messages_) {
    if (msg.direction == Direction::kUplink) rounds.insert(msg.round);
  }
  return static_cast<int>(rounds.size());
}

int Transcript::BroadcastCount() const {
  return static_cast<int>(
      std::count_if(messages_.begin(), messages_.end(), [](const Message& m) {
        return m.direction == Direction::kBroadcast;
      }));
}

void Transcript::WriteCsv(std::ostream& out) const {
  out << "round,machine,role,payload_norm,noise_s\n";
  const auto old_precision = out.precision(12);
  for (const Message& msg : messages_) {
    out << msg.round << ',' << msg.machine << ','
        << (msg.direction == Direction::kBroadcast ? "broadcast"
                                                   : RoleName(msg.role))
        << ',' << msg.payload.norm() << ',' << msg.noise_s << '\n';
  }
  out.precision(old_precision);
}

Vector Emit(const Machine& machine, std::string_view round,
            const Vector& honest_value, double noise_s, Rng& rng,
            Transcript& transcript) {
  Vector sent = AddGaussianNoise(honest_value, noise_s, rng);
  if (machine.role == Role::kByzantine) sent = machine.attack.Apply(sent);
  transcript.Record({std::string(round), machine.id, machine.role,
                     Direction::kUplink, sent, noise_s});
  return sent;
}

void Broadcast(std::string_view round, const Vector& value,
               Transcript& transcript) {
  transcript.Record({std::string(round), 0, Role::kHonest,
                     Direction::kBroadcast, value, 0.0});
}

}  // namespace robustqn
