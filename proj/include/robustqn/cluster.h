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

#ifndef ROBUSTQN_CLUSTER_H_
#define ROBUSTQN_CLUSTER_H_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "robustqn/model.h"
#include "robustqn/rng.h"
#include "robustqn/types.h"

// In-process simulation of one central processor (machine 0) and m node
// machines exchanging vectors in synchronous rounds.

namespace robustqn {

enum class AttackKind { kNone, kScale, kReplace };

struct Attack {
  AttackKind kind = AttackKind::kNone;
  double factor = 1.0;  // kScale
  Vector replacement;   // kReplace

  static Attack None() { return {}; }
  static Attack Scale(double factor) { return {AttackKind::kScale, factor, {}}; }
  static Attack Replace(Vector v) {
    return {AttackKind::kReplace, 1.0, std::move(v)};
  }

  Vector Apply(const Vector& outgoing) const;
};

enum class Role { kHonest, kByzantine };

std::string_view RoleName(Role role);

struct Machine {
  int id = 0;
  Dataset shard;  // empty for a data-less center
  Role role = Role::kHonest;
  Attack attack;
  std::uint64_t seed = 0;
};

struct ClusterConfig {
  int m = 100;          // node machines; machine 0 is extra
  double alpha = 0.0;   // Byzantine fraction of the node machines
  Attack attack = Attack::Scale(-3.0);
  bool central_has_data = true;
};

struct ShardResult {
  std::vector<Dataset> shards;
  Eigen::Index dropped = 0;  // trailing samples that did not fit
};

// Splits the first shards * floor(N / shards) samples into equal disjoint
// shards after a seeded permutation. A warning goes to stderr when samples
// are dropped. Throws std::invalid_argument when N < shards.
ShardResult ShardData(const Dataset& full, int shards, std::uint64_t seed);

// The first floor(alpha m) ids of a seeded shuffle of {1..m}, sorted.
std::vector<int> ChooseByzantine(int m, double alpha, std::uint64_t seed);

class Cluster {
 public:
  // Shards `full` over m + 1 machines (or m when the center holds no data)
  // and assigns Byzantine roles. All randomness derives from `seed`.
  static Cluster Build(const Dataset& full, const ClusterConfig& cfg,
                       std::uint64_t seed);

  explicit Cluster(std::vector<Machine> machines);

  const std::vector<Machine>& machines() const { return machines_; }
  const Machine& machine(int id) const { return machines_.at(id); }
  const Machine& central() const { return machines_.front(); }
  int m() const { return static_cast<int>(machines_.size()) - 1; }
  // Local sample size of the node machines.
  Eigen::Index n() const { return machines_.back().shard.n(); }
  int byzantine_count() const;

 private:
  std::vector<Machine> machines_;
};

enum class Direction { kUplink, kBroadcast };

struct Message {
  std::string round;
  int machine = 0;
  Role role = Role::kHonest;
  Direction direction = Direction::kUplink;
  Vector payload;
  double noise_s = 0.0;
};

class Transcript {
 public:
  void Record(Message message);

  // Uplink payloads of `round`, one row per machine ordered by id. Throws
  // std::logic_error if the round has a number of senders other than
  // `expected` or a machine sent twice.
  Matrix Collect(std::string_view round, int expected) const;

  const std::vector<Message>& messages() const { return messages_; }
  int UplinkRoundCount() const;
  int BroadcastCount() const;
  // Uplink payload bytes (8 per entry).
  std::uint64_t bytes_sent() const { return bytes_sent_; }

  // CSV with header round,machine,role,payload_norm,noise_s. Broadcast rows
  // use machine 0 and role "broadcast".
  void WriteCsv(std::ostream& out) const;

 private:
  std::vector<Message> messages_;
  std::uint64_t bytes_sent_ = 0;
};

// Sends `honest_value` from `machine` to the center: Gaussian noise of scale
// `noise_s` first, then the machine's attack. Records the message and
// returns what the center receives.
Vector Emit(const Machine& machine, std::string_view round,
            const Vector& honest_value, double noise_s, Rng& rng,
            Transcript& transcript);

// Records a center-to-node broadcast.
void Broadcast(std::string_view round, const Vector& value,
               Transcript& transcript);

}  // namespace robustqn

#endif  // ROBUSTQN_CLUSTER_H_
