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

#include "xfsm.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <nlohmann/json.hpp>
#include <sstream>

#include "control.h"
#include "error.h"
#include "hazard.h"
#include "program.h"
#include "programs.h"
#include "runner.h"
#include "trace.h"
#include "values.h"
#include "wire.h"

struct xfsm_switch {
  std::unique_ptr<xfsm::Switch> sw;
};

namespace {

using json = nlohmann::json;

thread_local std::string last_error;

xfsm_status fail(xfsm_status s, const std::string &msg) {
  last_error = msg;
  return s;
}

template <class F>
xfsm_status guard(F &&f) {
  try {
    f();
    last_error.clear();
    return XFSM_OK;
  } catch (const xfsm::Error &e) {
    return fail(static_cast<xfsm_status>(e.code()), e.what());
  } catch (const std::bad_alloc &) {
    return fail(XFSM_E_INTERNAL, "out of memory");
  } catch (const std::exception &e) {
    return fail(XFSM_E_INTERNAL, e.what());
  }
}

char *dup_string(const std::string &s) {
  char *p = static_cast<char *>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

void need(const void *p, const char *name) {
  if (!p)
    throw xfsm::Error(xfsm::ErrorCode::kInvalidArgument,
                      std::string(name) + " is NULL");
}

xfsm::OutputFormat to_format(xfsm_format f) {
  return f == XFSM_FORMAT_TEXT ? xfsm::OutputFormat::kText
                               : xfsm::OutputFormat::kJson;
}

json describe(const xfsm::wire::Message &m) {
  namespace w = xfsm::wire;
  json j;
  j["xid"] = m.xid;
  std::visit(
      [&](const auto &b) {
        using T = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<T, w::StateMod>) {
          static const char *names[] = {"SET_L_EXTRACTOR", "SET_U_EXTRACTOR",
                                        "ADD_FLOW_STATE", "DEL_FLOW_STATE"};
          j["type"] = "STATE_MOD";
          j["table_id"] = b.table_id;
          j["command"] = names[static_cast<int>(b.command)];
          if (const auto *x = std::get_if<w::Extractor>(&b.payload)) {
            auto fields = json::array();
            for (auto f : x->fields) {
              auto id = f <= 0xff ? xfsm::field_from_oxm(f) : std::nullopt;
              fields.push_back(id ? json(std::string(xfsm::field_info(*id).name))
                                  : json(f));
            }
            j["fields"] = fields;
          } else {
            const auto &e = std::get<w::StateEntryWire>(b.payload);
            j["key_hex"] = xfsm::to_hex(e.key);
            j["state"] = e.state;
            j["timeout"] = e.timeout;
            j["to_state"] = e.to_state;
          }
        } else if constexpr (std::is_same_v<T, w::FlowMod>) {
          j["type"] = "FLOW_MOD";
          j["table_id"] = b.table_id;
          j["command"] = b.command;
          j["priority"] = b.priority;
          j["match_fields"] = b.match.size();
          j["instructions"] = b.instructions.size();
        } else if constexpr (std::is_same_v<T, w::TableMod>) {
          j["type"] = "TABLE_MOD";
          j["table_id"] = b.table_id;
          j["config"] = b.config;
        } else if constexpr (std::is_same_v<T, w::FeaturesRequest>) {
          j["type"] = "FEATURES_REQUEST";
        } else {
          j["type"] = "FEATURES_REPLY";
          j["n_tables"] = b.n_tables;
          j["capabilities"] = b.capabilities;
        }
      },
      m.body);
  return j;
}

}  // namespace

extern "C" {

const char *xfsm_status_name(xfsm_status status) {
  if (status == XFSM_OK) return "OK";
  if (status == XFSM_E_INTERNAL) return "Internal";
  return xfsm::error_code_name(static_cast<xfsm::ErrorCode>(status));
}

const char *xfsm_last_error(void) { return last_error.c_str(); }

void xfsm_free(void *ptr) { std::free(ptr); }

xfsm_status xfsm_switch_create(uint32_t num_ports, xfsm_switch **out) {
  return guard([&] {
    need(out, "out");
    if (num_ports == 0)
      throw xfsm::Error(xfsm::ErrorCode::kInvalidArgument,
                        "need at least one port");
    auto h = std::make_unique<xfsm_switch>();
    h->sw = std::make_unique<xfsm::Switch>(num_ports);
    *out = h.release();
  });
}

xfsm_status xfsm_switch_add_table(xfsm_switch *sw, uint8_t table_id,
                                  int stateful) {
  return guard([&] {
    need(sw, "sw");
    xfsm::BlockOptions opts;
    opts.stateful = stateful != 0;
    sw->sw->add_table(table_id, opts);
  });
}

xfsm_status xfsm_switch_load_program(const char *path, xfsm_switch **out) {
  return guard([&] {
    need(path, "path");
    need(out, "out");
    auto h = std::make_unique<xfsm_switch>();
    h->sw = xfsm::instantiate(xfsm::load_program(path));
    *out = h.release();
  });
}

xfsm_status xfsm_switch_parse_program(const char *text, xfsm_switch **out) {
  return guard([&] {
    need(text, "text");
    need(out, "out");
    auto h = std::make_unique<xfsm_switch>();
    h->sw = xfsm::instantiate(xfsm::parse_program(text));
    *out = h.release();
  });
}

void xfsm_switch_destroy(xfsm_switch *sw) { delete sw; }

xfsm_status xfsm_switch_submit(xfsm_switch *sw, const uint8_t *frame,
                               size_t len, uint32_t in_port, uint64_t ts_us,
                               xfsm_format format, char **verdict) {
  return guard([&] {
    need(sw, "sw");
    need(frame, "frame");
    auto v = sw->sw->submit(std::vector<uint8_t>(frame, frame + len), in_port,
                            ts_us);
    if (verdict) {
      uint64_t seq = sw->sw->counters().packets;
      std::string line = format == XFSM_FORMAT_TEXT
                             ? xfsm::verdict_text(seq, v)
                             : xfsm::verdict_json(seq, v).dump();
      *verdict = dup_string(line);
    }
  });
}

xfsm_status xfsm_switch_run_trace(xfsm_switch *sw, const char *trace_text,
                                  xfsm_format format, char **log,
                                  uint64_t *last_ts) {
  return guard([&] {
    need(sw, "sw");
    need(trace_text, "trace_text");
    auto trace = xfsm::parse_trace(trace_text);
    std::ostringstream out;
    auto summary = xfsm::run_trace(sw->sw.get(), trace, log ? &out : nullptr,
                                   to_format(format));
    if (log) *log = dup_string(out.str());
    if (last_ts) *last_ts = summary.last_ts;
  });
}

xfsm_status xfsm_switch_dump_state(xfsm_switch *sw, uint64_t now_us,
                                   xfsm_format format, char **out) {
  return guard([&] {
    need(sw, "sw");
    need(out, "out");
    *out = dup_string(format == XFSM_FORMAT_TEXT
                          ? xfsm::dump_state_text(*sw->sw, now_us)
                          : xfsm::dump_state(*sw->sw, now_us).dump());
  });
}

xfsm_status xfsm_switch_apply_message(xfsm_switch *sw, const uint8_t *msg,
                                      size_t len, uint64_t now_us,
                                      uint8_t **reply, size_t *reply_len) {
  return guard([&] {
    need(sw, "sw");
    need(msg, "msg");
    if (reply) *reply = nullptr;
    if (reply_len) *reply_len = 0;
    auto msgs = xfsm::wire::decode_stream({msg, len});
    std::vector<uint8_t> out;
    for (const auto &m : msgs) {
      if (auto r = xfsm::apply(sw->sw.get(), m, now_us)) {
        auto bytes = xfsm::wire::encode(*r);
        out.insert(out.end(), bytes.begin(), bytes.end());
      }
    }
    if (reply && !out.empty()) {
      auto *p = static_cast<uint8_t *>(std::malloc(out.size()));
      if (!p) throw std::bad_alloc();
      std::memcpy(p, out.data(), out.size());
      *reply = p;
      if (reply_len) *reply_len = out.size();
    }
  });
}

xfsm_status xfsm_switch_capabilities(xfsm_switch *sw, uint32_t *capabilities) {
  return guard([&] {
    need(sw, "sw");
    need(capabilities, "capabilities");
    *capabilities = xfsm::capabilities(*sw->sw).capabilities;
  });
}

xfsm_status xfsm_switch_table_config(xfsm_switch *sw, uint8_t table_id,
                                     uint32_t *config) {
  return guard([&] {
    need(sw, "sw");
    need(config, "config");
    for (const auto &t : xfsm::capabilities(*sw->sw).tables) {
      if (t.table_id == table_id) {
        *config = t.config;
        return;
      }
    }
    throw xfsm::Error(xfsm::ErrorCode::kUnknownTable,
                      "no table " + std::to_string(table_id));
  });
}

xfsm_status xfsm_describe_messages(const uint8_t *msg, size_t len,
                                   char **out) {
  return guard([&] {
    need(msg, "msg");
    need(out, "out");
    auto arr = json::array();
    for (const auto &m : xfsm::wire::decode_stream({msg, len}))
      arr.push_back(describe(m));
    *out = dup_string(arr.dump());
  });
}

xfsm_status xfsm_gen_mac_learning(uint32_t num_ports, int parametric,
                                  char **yaml) {
  return guard([&] {
    need(yaml, "yaml");
    *yaml = dup_string(xfsm::write_program(
        xfsm::programs::mac_learning(num_ports, parametric != 0)));
  });
}

xfsm_status xfsm_gen_mpls_learning(const uint32_t *edge_ports,
                                   size_t n_edge_ports,
                                   const uint32_t *switch_ids,
                                   size_t n_switch_ids, uint32_t self_id,
                                   char **yaml) {
  return guard([&] {
    need(yaml, "yaml");
    if (n_edge_ports) need(edge_ports, "edge_ports");
    if (n_switch_ids) need(switch_ids, "switch_ids");
    xfsm::programs::MplsLearningConfig cfg;
    cfg.edge_ports.assign(edge_ports, edge_ports + n_edge_ports);
    cfg.switch_ids.assign(switch_ids, switch_ids + n_switch_ids);
    cfg.self_id = self_id;
    *yaml = dup_string(xfsm::write_program(xfsm::programs::mpls_learning(cfg)));
  });
}

xfsm_status xfsm_gen_port_knocking(uint32_t num_ports, uint32_t server_port,
                                   char **yaml) {
  return guard([&] {
    need(yaml, "yaml");
    if (server_port < 1 || server_port > num_ports)
      throw xfsm::Error(xfsm::ErrorCode::kInvalidArgument,
                        "server port outside the switch");
    *yaml = dup_string(xfsm::write_program(
        xfsm::programs::port_knocking(num_ports, server_port)));
  });
}

xfsm_status xfsm_gen_ddos(const char *const *destinations,
                          size_t n_destinations, uint64_t stage1_rate,
                          uint64_t stage1_burst, uint64_t stage2_rate,
                          uint64_t stage2_burst, char **yaml) {
  return guard([&] {
    need(yaml, "yaml");
    if (n_destinations) need(destinations, "destinations");
    xfsm::programs::DdosConfig cfg;
    for (size_t i = 0; i < n_destinations; i++) {
      need(destinations[i], "destination");
      cfg.destinations.push_back(xfsm::parse_ipv4(destinations[i]));
    }
    cfg.stage1_rate = stage1_rate;
    cfg.stage1_burst = stage1_burst;
    cfg.stage2_rate = stage2_rate;
    cfg.stage2_burst = stage2_burst;
    *yaml = dup_string(
        xfsm::write_program(xfsm::programs::ddos_mitigation(cfg)));
  });
}

void xfsm_trace_spec_init(xfsm_trace_spec *spec) {
  if (!spec) return;
  xfsm::TraceGenSpec d;
  spec->kind = "mac";
  spec->seed = d.seed;
  spec->ports = d.ports;
  spec->hosts = d.hosts;
  spec->packets = d.packets;
  spec->interval_us = d.interval_us;
  spec->broadcast_permille = d.broadcast_permille;
  spec->move_permille = d.move_permille;
}

xfsm_status xfsm_gen_trace(const xfsm_trace_spec *spec, char **jsonl) {
  return guard([&] {
    need(spec, "spec");
    need(jsonl, "jsonl");
    xfsm::TraceGenSpec s;
    if (spec->kind) s.kind = spec->kind;
    s.seed = spec->seed;
    s.ports = spec->ports;
    s.hosts = spec->hosts;
    s.packets = spec->packets;
    s.interval_us = spec->interval_us;
    s.broadcast_permille = spec->broadcast_permille;
    s.move_permille = spec->move_permille;
    *jsonl = dup_string(xfsm::gen_trace(s));
  });
}

xfsm_status xfsm_hazard_simulate(const char *schedule_json,
                                 uint32_t num_ports, uint32_t latency,
                                 int strict, char **report_json) {
  return guard([&] {
    need(schedule_json, "schedule_json");
    need(report_json, "report_json");
    json doc;
    try {
      doc = json::parse(schedule_json);
    } catch (const json::exception &e) {
      throw xfsm::Error(xfsm::ErrorCode::kSchemaError, e.what());
    }
    const json &sched = doc.is_object() && doc.contains("schedules")
                            ? doc["schedules"]
                            : doc;
    if (!sched.is_array())
      throw xfsm::Error(xfsm::ErrorCode::kSchemaError,
                        "schedules: expected an array of per-port arrays");
    xfsm::HazardConfig cfg;
    cfg.latency = latency;
    cfg.num_ports = num_ports;
    cfg.mode = strict ? xfsm::MixerMode::kStrict
                      : xfsm::MixerMode::kWorkConserving;
    for (std::size_t p = 0; p < sched.size(); p++) {
      if (!sched[p].is_array())
        throw xfsm::Error(xfsm::ErrorCode::kSchemaError,
                          "schedules[" + std::to_string(p) +
                              "]: expected an array");
      std::vector<xfsm::Arrival> port;
      for (std::size_t i = 0; i < sched[p].size(); i++) {
        const auto &a = sched[p][i];
        std::string where = "schedules[" + std::to_string(p) + "][" +
                            std::to_string(i) + "]";
        if (!a.is_object() || !a.contains("cycle") || !a.contains("flow") ||
            !a["cycle"].is_number_unsigned())
          throw xfsm::Error(xfsm::ErrorCode::kSchemaError,
                            where + ": expected {cycle: uint, flow}");
        std::string flow = a["flow"].is_string() ? a["flow"].get<std::string>()
                                                 : a["flow"].dump();
        port.push_back({a["cycle"].get<uint64_t>(), flow});
      }
      cfg.schedules.push_back(std::move(port));
    }
    auto report = xfsm::simulate(cfg);
    json out;
    out["latency"] = latency;
    out["ports"] = num_ports;
    out["mixer"] = strict ? "strict" : "work-conserving";
    auto processed = json::array();
    for (const auto &e : report.processed)
      processed.push_back({{"cycle", e.cycle},
                           {"port", e.port},
                           {"arrival", e.arrival},
                           {"flow", e.flow}});
    out["processed"] = processed;
    auto hazards = json::array();
    for (const auto &h : report.hazards)
      hazards.push_back({{"cycle", h.cycle},
                         {"flow", h.flow},
                         {"stale_read_of", h.stale_read_of}});
    out["hazards"] = hazards;
    out["hazard_count"] = report.hazards.size();
    *report_json = dup_string(out.dump());
  });
}

xfsm_status xfsm_min_safe_ports(uint32_t latency, int strict,
                                uint32_t *num_ports) {
  return guard([&] {
    need(num_ports, "num_ports");
    *num_ports = xfsm::min_safe_ports(
        latency, strict ? xfsm::MixerMode::kStrict
                        : xfsm::MixerMode::kWorkConserving);
  });
}

}  // extern "C"
