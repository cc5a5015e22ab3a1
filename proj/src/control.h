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

#ifndef XFSM_CONTROL_H_
#define XFSM_CONTROL_H_

#include <cstdint>
#include <optional>
#include <vector>

#include "switch.h"
#include "wire.h"

namespace xfsm {

struct TableConfig {
  uint8_t table_id;
  uint32_t config;  // wire::kTableConfigStateful when stateful
  bool operator==(const TableConfig &) const = default;
};

struct Capabilities {
  uint32_t capabilities{0};
  std::vector<TableConfig> tables;
};

Capabilities capabilities(const Switch &sw);

// Applies one control message between packets. Returns the reply for
// request messages. Throws Error{kUnknownTable} and block-level errors.
std::optional<wire::Message> apply(Switch *sw, const wire::Message &msg,
                                   uint64_t now = 0);

// XFSM entry <-> OFPT_FLOW_MOD (ADD). Entries using program-file-only
// features (masked or parametric set-state, scope overrides, a meter that is
// not the first action) have no wire form and throw Error{kInvalidArgument}.
wire::FlowMod to_flow_mod(uint8_t table_id, const XfsmEntry &entry);
XfsmEntry from_flow_mod(const wire::FlowMod &fm);

wire::Message set_extractor(uint8_t table_id, bool lookup,
                            const ScopeSpec &scope);

}  // namespace xfsm

#endif  // XFSM_CONTROL_H_
