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

#ifndef XFSM_RUNNER_H_
#define XFSM_RUNNER_H_

#include <cstdint>
#include <nlohmann/json.hpp>
#include <ostream>
#include <string>
#include <vector>

#include "switch.h"
#include "trace.h"

namespace xfsm {

enum class OutputFormat { kJson, kText };

// {pkt_seq, verdict, out_ports, dscp, table_path, state_transitions}
nlohmann::json verdict_json(uint64_t seq, const Verdict &v);
std::string verdict_text(uint64_t seq, const Verdict &v);

// Live flow states at `now`, sorted by (table, key_hex): entries past their
// timeout show their rollback state; entries that rolled back to DEFAULT
// are omitted. Does not modify the tables.
nlohmann::json dump_state(const Switch &sw, uint64_t now);
std::string dump_state_text(const Switch &sw, uint64_t now);

struct RunSummary {
  uint64_t packets{0};
  uint64_t last_ts{0};
};

// Submits every packet in order at its timestamp and writes one log line
// per packet. Throws Error{kSchemaError} naming the packet for an in_port
// outside the switch.
RunSummary run_trace(Switch *sw, const std::vector<TracePacket> &trace,
                     std::ostream *log, OutputFormat format);

}  // namespace xfsm

#endif  // XFSM_RUNNER_H_
