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

#include "switch.h"

#include <algorithm>
#include <set>

#include "error.h"

namespace xfsm {

Switch::Switch(uint32_t num_ports) : num_ports_(num_ports) {
  if (num_ports == 0)
    throw Error(ErrorCode::kInvalidArgument, "switch needs at least one port");
}

StatefulBlock &Switch::add_table(uint8_t table_id, BlockOptions options) {
  if (tables_.count(table_id))
    throw Error(ErrorCode::kInvalidArgument,
                "table " + std::to_string(table_id) + " already exists");
  auto &slot = tables_[table_id];
  slot = std::make_unique<StatefulBlock>(table_id, options);
  return *slot;
}

bool Switch::has_table(uint8_t table_id) const {
  return tables_.count(table_id) != 0;
}

StatefulBlock &Switch::table(uint8_t table_id) {
  auto it = tables_.find(table_id);
  if (it == tables_.end())
    throw Error(ErrorCode::kUnknownTable,
                "no table " + std::to_string(table_id));
  return *it->second;
}

const StatefulBlock &Switch::table(uint8_t table_id) const {
  return const_cast<Switch *>(this)->table(table_id);
}

std::vector<uint8_t> Switch::table_ids() const {
  std::vector<uint8_t> ids;
  for (const auto &[id, t] : tables_) ids.push_back(id);
  return ids;
}

void Switch::add_meter(Meter meter) {
  auto id = meter.id();
  if (meters_.count(id))
    throw Error(ErrorCode::kInvalidArgument,
                "meter " + std::to_string(id) + " already exists");
  meters_.emplace(id, std::move(meter));
}

bool Switch::has_meter(uint32_t meter_id) const {
  return meters_.count(meter_id) != 0;
}

Meter &Switch::meter(uint32_t meter_id) {
  auto it = meters_.find(meter_id);
  if (it == meters_.end())
    throw Error(ErrorCode::kUnknownMeter,
                "no meter " + std::to_string(meter_id));
  return it->second;
}

std::vector<uint32_t> Switch::meter_ids() const {
  std::vector<uint32_t> ids;
  for (const auto &[id, m] : meters_) ids.push_back(id);
  return ids;
}

void Switch::activate() {
  for (auto &[id, t] : tables_) {
    for (const auto &e : t->entries()) {
      if (e.goto_table && !tables_.count(*e.goto_table))
        throw Error(ErrorCode::kUnknownTable,
                    "table " + std::to_string(id) + " jumps to missing table " +
                        std::to_string(*e.goto_table));
      for (const auto &a : e.actions) {
        if (const auto *m = std::get_if<action::Meter>(&a);
            m && !meters_.count(m->meter_id))
          throw Error(ErrorCode::kUnknownMeter,
                      "table " + std::to_string(id) + " uses missing meter " +
                          std::to_string(m->meter_id));
      }
    }
    t->activate();
  }
}

void Switch::apply_meter(uint32_t meter_id, ParsedPacket *pkt, uint64_t now) {
  meter(meter_id).apply(pkt, now);
}

Verdict Switch::submit(std::vector<uint8_t> bytes, uint32_t in_port,
                       uint64_t now) {
  if (in_port == 0 || in_port > num_ports_)
    throw Error(ErrorCode::kInvalidArgument,
                "in_port " + std::to_string(in_port) + " outside [1, " +
                    std::to_string(num_ports_) + "]");
  counters_.packets++;
  Verdict v;
  std::optional<ParsedPacket> parsed;
  try {
    parsed.emplace(ParsedPacket::parse(std::move(bytes), in_port));
  } catch (const Error &e) {
    counters_.parse_errors++;
    counters_.dropped++;
    v.reason = std::string("parse error: ") + e.what();
    return v;
  }
  auto &pkt = *parsed;

  std::set<uint32_t> ports;
  bool flood = false;
  bool dropped = false;
  auto it = tables_.begin();
  while (it != tables_.end()) {
    auto &block = *it->second;
    v.table_path.push_back(block.table_id());
    auto r = block.process(&pkt, now, this);
    for (auto &w : r.warnings) v.warnings.push_back(std::move(w));
    if (r.transition) v.transitions.push_back(std::move(*r.transition));
    if (r.drop) {
      dropped = true;
      v.reason = r.matched ? "drop action" : "no XFSM match";
      break;
    }
    ports.insert(r.outputs.begin(), r.outputs.end());
    flood = flood || r.flood;
    if (!r.goto_table) break;
    it = tables_.find(*r.goto_table);
    if (it == tables_.end()) {
      dropped = true;
      v.reason = "goto to missing table";
    }
  }

  v.bytes = pkt.bytes();
  if (auto d = pkt.get(FieldId::kIpDscp)) v.dscp = static_cast<uint8_t>(*d);
  if (!dropped) {
    if (flood)
      for (uint32_t p = 1; p <= num_ports_; p++) ports.insert(p);
    // Never back out of the ingress port.
    ports.erase(in_port);
    for (auto p : ports)
      if (p >= 1 && p <= num_ports_) v.out_ports.push_back(p);
    if (v.out_ports.empty()) {
      dropped = true;
      v.reason = "no output port";
    }
  }
  v.dropped = dropped;
  if (dropped) {
    v.out_ports.clear();
    counters_.dropped++;
  } else {
    counters_.forwarded++;
  }
  return v;
}

}  // namespace xfsm
