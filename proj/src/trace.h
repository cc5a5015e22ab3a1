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

#ifndef XFSM_TRACE_H_
#define XFSM_TRACE_H_

#include <cstdint>
#include <string>
#include <vector>

namespace xfsm {

struct TracePacket {
  uint64_t ts{0};  // virtual time, microseconds
  uint32_t port{0};
  std::vector<uint8_t> bytes;
};

// JSON lines, one packet per line: {"port", "ts", "hex"} or the shorthand
// {"port", "ts", "eth_src", "ip_dst", "tcp_dst", ...}. A missing ts repeats
// the previous one. Blank lines and '#' comment lines are skipped. Throws
// Error{kSchemaError} naming the line and key.
std::vector<TracePacket> parse_trace(const std::string &text);
std::vector<TracePacket> load_trace(const std::string &path);

struct TraceGenSpec {
  std::string kind{"mac"};  // mac | knock | ddos
  uint64_t seed{1};
  uint32_t ports{4};
  uint32_t hosts{50};
  uint64_t packets{10000};
  uint64_t interval_us{10};
  uint32_t broadcast_permille{50};  // mac: share of broadcast frames
  uint32_t move_permille{5};        // mac: share of host moves
};

// Deterministic for a given spec. The ddos kind is a fixed scripted
// scenario (see ddos_scenario) and ignores the size parameters.
std::string gen_trace(const TraceGenSpec &spec);

// Hosts of the scripted DDoS scenario, all sending TCP SYNs to kVictim on
// port 1 toward port 2:
//   pre-attack flows: 10 pps for the whole run, start before any attack
//   heavy hitter: 300 pps in [1.0 s, 2.7 s) and [4.6 s, 5.9 s)
//   stage-1 flows: 5 pps in [1.5 s, 2.5 s), while only stage 1 is exceeded
//   spoofed flood: 800 pps of one-packet flows in [3.0 s, 4.0 s)
//   stage-2 flows: 10 pps in [3.2 s, 3.7 s), during the flood; the first two
//     send 3 more packets in [5.0 s, 5.3 s), when only stage 1 is exceeded
// Tracked packets share their timestamp with a preceding heavy-hitter or
// flood packet so the meter verdict they see does not depend on token
// phase.
namespace ddos_scenario {
inline constexpr uint32_t kVictim = 0x0a000064;  // 10.0.0.100
inline constexpr uint32_t kPreAttack[3] = {0x0a010001, 0x0a010002, 0x0a010003};
inline constexpr uint32_t kHeavy = 0x0a090909;
inline constexpr uint32_t kStage1[4] = {0x0a030001, 0x0a030002, 0x0a030003,
                                        0x0a030004};
inline constexpr uint32_t kStage2[4] = {0x0a040001, 0x0a040002, 0x0a040003,
                                        0x0a040004};
inline constexpr int kStage2Returning = 2;  // kStage2[0..1] come back
inline constexpr int kStage2Packets = 5;    // per flow, during the flood
}  // namespace ddos_scenario

}  // namespace xfsm

#endif  // XFSM_TRACE_H_
