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

#ifndef ROBUSTQN_RNG_H_
#define ROBUSTQN_RNG_H_

#include <cstdint>
#include <initializer_list>
#include <random>

namespace robustqn {

using Rng = std::mt19937_64;

// One round of the splitmix64 finalizer.
std::uint64_t SplitMix64(std::uint64_t x);

// Derives an independent child seed from `base` and a path of labels, e.g.
// DeriveSeed(master, {kNoiseStream, machine_id, round}).
std::uint64_t DeriveSeed(std::uint64_t base,
                         std::initializer_list<std::uint64_t> path);

}  // namespace robustqn

#endif  // ROBUSTQN_RNG_H_
