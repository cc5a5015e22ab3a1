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

#ifndef XFSM_PROGRAMS_H_
#define XFSM_PROGRAMS_H_

#include <cstdint>
#include <vector>

#include "program.h"

namespace xfsm {
namespace programs {

// Learning switch on table 0: lookup [eth_dst], update [eth_src], state =
// learned output port. The full form has one entry per (state, in_port)
// pair; the parametric form keeps one DEFAULT entry per port and a single
// output-to-state entry that writes in_port.
ProgramDef mac_learning(uint32_t num_ports, bool parametric = false);

// Edge switch learning (edge port, ingress switch) pairs. The 32-bit state
// label packs the edge port in the high half and the remote switch id in
// the low half; 0 in a half means not learned. MPLS labels carry
// (egress id << 10) | ingress id, egress 0 meaning broadcast.
struct MplsLearningConfig {
  std::vector<uint32_t> edge_ports;
  std::vector<uint32_t> switch_ids;  // remote edge switches
  uint32_t self_id{1};
  uint32_t transport_port{0};  // 0: one past the highest edge port
};
ProgramDef mpls_learning(const MplsLearningConfig &cfg);

inline constexpr StateLabel mpls_state(uint32_t port, uint32_t switch_id) {
  return port << 16 | (switch_id & 0xffff);
}
inline constexpr uint32_t mpls_label(uint32_t egress, uint32_t ingress) {
  return (egress & 0x3ff) << 10 | (ingress & 0x3ff);
}

namespace knock {
inline constexpr StateLabel kDefault = 0;
inline constexpr StateLabel kStage1 = 1;
inline constexpr StateLabel kStage2 = 2;
inline constexpr StateLabel kStage3 = 3;
inline constexpr StateLabel kOpen = 4;
inline constexpr uint16_t kSequence[4] = {5123, 6234, 7345, 8456};
inline constexpr uint16_t kServicePort = 22;
}  // namespace knock

// Port knocking keyed on ip_src. Knocks are dropped; once open only TCP
// port 22 is forwarded, to `server_port`.
ProgramDef port_knocking(uint32_t num_ports = 2, uint32_t server_port = 2);

namespace ddos {
inline constexpr StateLabel kGreen = 1;
inline constexpr StateLabel kYellow = 2;
inline constexpr StateLabel kRed = 3;
inline constexpr uint8_t kStage1Dscp = 1;
inline constexpr uint8_t kStage2Dscp = 2;
inline constexpr uint32_t kStage2MeterBase = 1000;
}  // namespace ddos

struct DdosConfig {
  std::vector<uint32_t> destinations;  // monitored IPv4 destinations
  uint64_t stage1_rate{100};           // packets per second
  uint64_t stage1_burst{10};
  uint64_t stage2_rate{400};
  uint64_t stage2_burst{10};
  uint32_t num_ports{2};
  uint32_t out_port{2};
};

// Four tables: 0 meters TCP toward each destination (stage 1), 1 is the
// GREEN/YELLOW machine on (ip_src, ip_dst), 2 meters again (stage 2), 3 is
// the YELLOW/RED machine. DSCP carries the meter verdict between tables.
ProgramDef ddos_mitigation(const DdosConfig &cfg);

}  // namespace programs
}  // namespace xfsm

#endif  // XFSM_PROGRAMS_H_
