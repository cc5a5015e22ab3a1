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

#ifndef XFSM_SWITCH_H_
#define XFSM_SWITCH_H_

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "meter.h"
#include "packet.h"
#include "stateful_block.h"

namespace xfsm {

struct Verdict {
  bool dropped{true};
  std::vector<uint32_t> out_ports;  // ascending
  std::vector<uint8_t> bytes;       // serialized after all rewrites
  std::optional<uint8_t> dscp;
  std::vector<uint8_t> table_path;
  std::vector<StateTransition> transitions;
  std::string reason;  // set when dropped
  std::vector<std::string> warnings;
};

struct SwitchCounters {
  uint64_t packets{0};
  uint64_t forwarded{0};
  uint64_t dropped{0};
  uint64_t parse_errors{0};
};

// Ordered tables (stateful blocks or plain match tables) plus meters.
// Packets run to completion from the lowest table id following goto.
class Switch : public ActionContext {
 public:
  explicit Switch(uint32_t num_ports);

  uint32_t num_ports() const { return num_ports_; }

  StatefulBlock &add_table(uint8_t table_id, BlockOptions options = {});
  bool has_table(uint8_t table_id) const;
  // Throws Error{kUnknownTable}.
  StatefulBlock &table(uint8_t table_id);
  const StatefulBlock &table(uint8_t table_id) const;
  std::vector<uint8_t> table_ids() const;

  void add_meter(Meter meter);
  bool has_meter(uint32_t meter_id) const;
  Meter &meter(uint32_t meter_id);
  std::vector<uint32_t> meter_ids() const;

  // Checks goto targets and meter references, then activates every table.
  void activate();

  // Throws Error{kInvalidArgument} for an in_port outside [1, num_ports] and
  // configuration errors from table activation. Parse failures come back as
  // a dropped verdict.
  Verdict submit(std::vector<uint8_t> bytes, uint32_t in_port, uint64_t now);

  // Throws Error{kUnknownMeter}.
  void apply_meter(uint32_t meter_id, ParsedPacket *pkt,
                   uint64_t now) override;

  const SwitchCounters &counters() const { return counters_; }

 private:
  uint32_t num_ports_;
  std::map<uint8_t, std::unique_ptr<StatefulBlock>> tables_;
  std::map<uint32_t, Meter> meters_;
  SwitchCounters counters_;
};

}  // namespace xfsm

#endif  // XFSM_SWITCH_H_
