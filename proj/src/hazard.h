/* Copyright 2026 The xfsm Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *   http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef XFSM_HAZARD_H_
#define XFSM_HAZARD_H_

#include <cstdint>
#include <string>
#include <vector>

namespace xfsm {

struct Arrival {
  uint64_t cycle;
  std::string flow;
  bool operator==(const Arrival &) const = default;
};

enum class MixerMode {
  kWorkConserving,  // emit from the next non-empty port, skip idle ones
  kStrict,          // cycle t belongs to port t mod N, idle if empty
};

struct HazardConfig {
  uint32_t latency{5};
  uint32_t num_ports{1};
  // schedules[p] is port p's arrivals, strictly increasing in cycle. Ports
  // without a schedule are idle.
  std::vector<std::vector<Arrival>> schedules;
  MixerMode mode{MixerMode::kWorkConserving};
};

struct Emission {
  uint64_t cycle;
  uint32_t port;
  uint64_t arrival;
  std::string flow;
  bool operator==(const Emission &) const = default;
};

struct Hazard {
  uint64_t cycle;
  std::string flow;
  uint64_t stale_read_of;  // emission cycle of the uncommitted update
  bool operator==(const Hazard &) const = default;
};

struct HazardReport {
  std::vector<Emission> processed;
  std::vector<Hazard> hazards;
};

// Throws Error{kInvalidArgument} when the config breaks its invariants.
HazardReport simulate(const HazardConfig &cfg);

// Smallest N for which no single-port back-to-back same-flow burst produces
// a hazard under the given mixer mode. Work-conserving mode is checked with
// every other port saturated by distinct flows.
uint32_t min_safe_ports(uint32_t latency, MixerMode mode = MixerMode::kStrict);

}  // namespace xfsm

#endif  // XFSM_HAZARD_H_
