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

#include "runner.h"

#include <algorithm>
#include <sstream>

#include "error.h"

namespace xfsm {

namespace {

struct DumpRow {
  uint8_t table;
  std::string scope;
  std::string key_hex;
  StateLabel state;
  uint64_t timeout_us;
  StateLabel to_state;
  uint64_t age_us;
};

std::vector<DumpRow> live_rows(const Switch &sw, uint64_t now) {
  std::vector<DumpRow> rows;
  for (auto id : sw.table_ids()) {
    const auto &block = sw.table(id);
    if (!block.lookup_scope()) continue;
    auto scope = block.lookup_scope()->to_string();
    for (const auto &e : block.states().entries()) {
      DumpRow r{id, scope, e.key.hex(), e.state, e.timeout_us, e.to_state, 0};
      uint64_t written = e.written_at;
      if (e.expired(now)) {
        if (e.to_state == kDefaultState) continue;
        written += e.timeout_us;
        r.state = e.to_state;
        r.timeout_us = 0;
        r.to_state = kDefaultState;
      }
      r.age_us = now >= written ? now - written : 0;
      rows.push_back(std::move(r));
    }
  }
  std::sort(rows.begin(), rows.end(), [](const DumpRow &a, const DumpRow &b) {
    return std::tie(a.table, a.key_hex) < std::tie(b.table, b.key_hex);
  });
  return rows;
}

}  // namespace

nlohmann::json verdict_json(uint64_t seq, const Verdict &v) {
  nlohmann::json j;
  j["pkt_seq"] = seq;
  j["verdict"] = v.dropped ? "drop" : "forward";
  j["out_ports"] = v.out_ports;
  j["dscp"] = v.dscp ? nlohmann::json(*v.dscp) : nlohmann::json(nullptr);
  auto path = nlohmann::json::array();
  for (auto t : v.table_path) path.push_back(t);
  j["table_path"] = path;
  auto ts = nlohmann::json::array();
  for (const auto &t : v.transitions)
    ts.push_back({{"table", t.table},
                  {"key_hex", t.key.hex()},
                  {"from", t.from},
                  {"to", t.to}});
  j["state_transitions"] = ts;
  return j;
}

std::string verdict_text(uint64_t seq, const Verdict &v) {
  std::ostringstream out;
  out << seq << " " << (v.dropped ? "drop" : "forward");
  if (v.dropped && !v.reason.empty()) out << " (" << v.reason << ")";
  if (!v.out_ports.empty()) {
    out << " ports=";
    for (std::size_t i = 0; i < v.out_ports.size(); i++)
      out << (i ? "," : "") << v.out_ports[i];
  }
  if (v.dscp) out << " dscp=" << static_cast<unsigned>(*v.dscp);
  out << " path=";
  for (std::size_t i = 0; i < v.table_path.size(); i++)
    out << (i ? ">" : "") << static_cast<unsigned>(v.table_path[i]);
  for (const auto &t : v.transitions)
    out << " t" << static_cast<unsigned>(t.table) << ":" << t.key.hex() << ":"
        << t.from << "->" << t.to;
  return out.str();
}

nlohmann::json dump_state(const Switch &sw, uint64_t now) {
  auto out = nlohmann::json::array();
  for (const auto &r : live_rows(sw, now))
    out.push_back({{"table", r.table},
                   {"scope", r.scope},
                   {"key_hex", r.key_hex},
                   {"state", r.state},
                   {"timeout_us", r.timeout_us},
                   {"to_state", r.to_state},
                   {"age_us", r.age_us}});
  return out;
}

std::string dump_state_text(const Switch &sw, uint64_t now) {
  std::ostringstream out;
  for (const auto &r : live_rows(sw, now)) {
    out << "table " << static_cast<unsigned>(r.table) << " [" << r.scope
        << "] " << r.key_hex << " state=" << r.state;
    if (r.timeout_us)
      out << " timeout=" << r.timeout_us << "us to=" << r.to_state;
    out << " age=" << r.age_us << "us\n";
  }
  return out.str();
}

RunSummary run_trace(Switch *sw, const std::vector<TracePacket> &trace,
                     std::ostream *log, OutputFormat format) {
  RunSummary summary;
  for (std::size_t i = 0; i < trace.size(); i++) {
    const auto &p = trace[i];
    if (p.port < 1 || p.port > sw->num_ports())
      throw Error(ErrorCode::kSchemaError,
                  "packet " + std::to_string(i + 1) + ": port " +
                      std::to_string(p.port) + " outside [1, " +
                      std::to_string(sw->num_ports()) + "]");
    auto v = sw->submit(p.bytes, p.port, p.ts);
    if (log) {
      if (format == OutputFormat::kJson)
        *log << verdict_json(i + 1, v).dump() << "\n";
      else
        *log << verdict_text(i + 1, v) << "\n";
    }
    summary.packets++;
    summary.last_ts = p.ts;
  }
  return summary;
}

}  // namespace xfsm
