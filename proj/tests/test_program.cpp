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

#include <gmock/gmock.h>
#include <gtest/gtest.h>

#include <functional>
#include <sstream>

#include "checks.h"
#include "error.h"
#include "program.h"
#include "programs.h"
#include "runner.h"
#include "trace.h"

namespace xfsm {
namespace {

using ::testing::HasSubstr;
using ::testing::StartsWith;

Error error_of(const std::function<void()> &fn) {
  try {
    fn();
  } catch (const Error &e) {
    return e;
  }
  return Error(ErrorCode{0}, "no error");
}

TEST(Program, WriteParseRoundTrip) {
  programs::MplsLearningConfig mpls;
  mpls.edge_ports = {1, 2};
  mpls.switch_ids = {2, 3};
  programs::DdosConfig ddos;
  ddos.destinations = {0x0a000064, 0x0a000065};
  for (const auto &def :
       {programs::mac_learning(3), programs::mac_learning(5, true),
        programs::port_knocking(), programs::mpls_learning(mpls),
        programs::ddos_mitigation(ddos)}) {
    auto text = write_program(def);
    EXPECT_EQ(parse_program(text), def) << text;
    EXPECT_EQ(write_program(parse_program(text)), text);
  }
}

TEST(Program, BundledFilesMatchGenerators) {
  auto load = [](const char *name) {
    return load_program(checks::source_path(std::string("programs/") + name));
  };
  EXPECT_EQ(load("mac_learning_4.yaml"), programs::mac_learning(4));
  EXPECT_EQ(load("mac_learning_4_parametric.yaml"),
            programs::mac_learning(4, true));
  EXPECT_EQ(load("port_knocking.yaml"), programs::port_knocking());
  programs::MplsLearningConfig mpls;
  mpls.edge_ports = {1, 2};
  mpls.switch_ids = {2, 3};
  EXPECT_EQ(load("mpls_learning.yaml"), programs::mpls_learning(mpls));
  programs::DdosConfig ddos;
  ddos.destinations = {ddos_scenario::kVictim};
  EXPECT_EQ(load("ddos.yaml"), programs::ddos_mitigation(ddos));
}

TEST(Program, JsonIsAccepted) {
  auto def = parse_program(
      R"({"switch": {"ports": 2}, "tables": [{"table": 0, "entries": )"
      R"([{"match": {"in_port": 1}, "actions": [{"output": 2}]}]}]})");
  ASSERT_EQ(def.tables.size(), 1u);
  EXPECT_EQ(def.tables[0].entries[0].actions,
            std::vector<Action>{action::Output{2}});
}

TEST(Program, SchemaErrorsNameLineAndPath) {
  struct Case {
    const char *text;
    const char *prefix;
    const char *detail;
  };
  const Case cases[] = {
      {"switch: {ports: 2}\ntables:\n  - table: 0\n    entries:\n"
       "      - priority: x\n",
       "line 5: tables[0].entries[0].priority", "integer"},
      {"switch: {ports: 2}\ntables:\n  - table: 0\n    bogus: 1\n",
       "line 4: tables[0]", "unknown key 'bogus'"},
      {"tables: []\n", "line 1: $", "missing switch"},
      {"switch: {ports: 2}\ntables:\n  - table: 0\n    entries:\n"
       "      - actions: [{output: 1}, {teleport: 3}]\n",
       "line 5: tables[0].entries[0].actions[1]", "teleport"},
      {"switch: {ports: 2}\ntables:\n  - table: 0\n    lookup_scope: [ttl]\n",
       "line 4: tables[0].lookup_scope", "ttl"},
      {"switch: {ports: 2}\ntables: [\n", "line ", ""},
  };
  for (const auto &c : cases) {
    auto e = error_of([&] { parse_program(c.text); });
    EXPECT_EQ(e.code(), ErrorCode::kSchemaError) << c.text;
    EXPECT_THAT(e.what(), StartsWith(c.prefix)) << c.text;
    EXPECT_THAT(e.what(), HasSubstr(c.detail)) << c.text;
  }
  EXPECT_EQ(error_of([] { load_program("/nonexistent/p.yaml"); }).code(),
            ErrorCode::kIoError);
}

TEST(Program, InstantiateErrors) {
  auto def = programs::mac_learning(2);
  auto no_meter = def;
  no_meter.tables[0].entries[0].actions.insert(
      no_meter.tables[0].entries[0].actions.begin(), action::Meter{9});
  EXPECT_EQ(error_of([&] { instantiate(no_meter); }).code(),
            ErrorCode::kUnknownMeter);

  auto bad_goto = def;
  bad_goto.tables[0].entries[0].goto_table = 7;
  EXPECT_EQ(error_of([&] { instantiate(bad_goto); }).code(),
            ErrorCode::kUnknownTable);

  auto scopes = def;
  scopes.tables[0].update_scope = std::vector<FieldId>{FieldId::kIpSrc};
  EXPECT_EQ(error_of([&] { instantiate(scopes); }).code(),
            ErrorCode::kIncompatibleScopes);

  auto no_default = programs::port_knocking();
  std::erase_if(no_default.tables[0].entries, [](const XfsmEntry &e) {
    return e.state.matches(State::of(kDefaultState));
  });
  EXPECT_EQ(error_of([&] { instantiate(no_default); }).code(),
            ErrorCode::kNoDefaultEntry);
}

TEST(Program, InitialStatesAndExceptions) {
  auto def = programs::mac_learning(2);
  def.tables[0].states.push_back({{0xb}, 2, 0, kDefaultState});
  def.tables[0].exceptions.push_back(
      {{FieldMatch{FieldId::kEthDst, 0xffffffffffff, 0xffffffffffff}}, 0, 1});
  auto sw = instantiate(parse_program(write_program(def)));
  FrameSpec to_b;
  to_b.eth_src = 0xa;
  to_b.eth_dst = 0xb;
  EXPECT_EQ(sw->submit(build_frame(to_b), 1, 0).out_ports,
            std::vector<uint32_t>{2});
  FrameSpec bcast;
  bcast.eth_src = 0xc;
  bcast.eth_dst = 0xffffffffffff;
  EXPECT_TRUE(sw->submit(build_frame(bcast), 1, 1).dropped);
  EXPECT_EQ(sw->submit(build_frame(bcast), 2, 2).out_ports,
            std::vector<uint32_t>{1});
}

TEST(Trace, ParseForms) {
  auto t = parse_trace(
      R"({"port": 1, "ts": 5, "hex": "ffffffffffff000000000001 0806"})"
      "\n\n"
      R"({"port": 2, "eth_src": "00:00:00:00:00:02", "ip_dst": "10.0.0.1"})"
      "\n");
  ASSERT_EQ(t.size(), 2u);
  EXPECT_EQ(t[0].bytes.size(), 14u);
  EXPECT_EQ(t[1].ts, 5u);
  EXPECT_EQ(t[1].port, 2u);
  auto pkt = parse(t[1].bytes, 2);
  EXPECT_EQ(pkt.get(FieldId::kEthSrc), 2u);
  EXPECT_EQ(pkt.get(FieldId::kIpDst), 0x0a000001u);
  EXPECT_TRUE(parse_trace("").empty());
  EXPECT_TRUE(parse_trace("# comment\n  # indented\n\n").empty());
}

TEST(Trace, Errors) {
  auto e1 = error_of([] { parse_trace("{\"port\": 1, \"hex\": \"zz\"}\n"); });
  EXPECT_EQ(e1.code(), ErrorCode::kSchemaError);
  EXPECT_THAT(e1.what(), StartsWith("line 1: hex"));
  auto e2 = error_of(
      [] { parse_trace("{\"port\": 1}\n{\"port\": 1, \"bogus\": 1}\n"); });
  EXPECT_THAT(e2.what(), StartsWith("line 2: bogus"));
  auto e3 = error_of([] { parse_trace("{\"port\": 1, \"ts\": 5}\n{\"ts\": 4}\n"); });
  EXPECT_EQ(e3.code(), ErrorCode::kSchemaError);
  EXPECT_THAT(e3.what(), StartsWith("line 2:"));
  EXPECT_EQ(error_of([] { parse_trace("not json\n"); }).code(),
            ErrorCode::kSchemaError);
}

TEST(Trace, GeneratorIsDeterministic) {
  for (const char *kind : {"mac", "knock", "ddos"}) {
    TraceGenSpec s;
    s.kind = kind;
    s.packets = 500;
    s.seed = 42;
    auto a = gen_trace(s);
    EXPECT_EQ(a, gen_trace(s)) << kind;
    EXPECT_FALSE(parse_trace(a).empty());
    if (std::string(kind) == "mac") {
      s.seed = 43;
      EXPECT_NE(a, gen_trace(s));
      EXPECT_EQ(parse_trace(a).size(), 500u);
    }
  }
}

TEST(Runner, KnockTraces) {
  auto def = load_program(checks::source_path("programs/port_knocking.yaml"));
  auto ok = load_trace(checks::source_path("traces/knock_ok.jsonl"));
  auto sw = instantiate(def);
  std::ostringstream log;
  auto summary = run_trace(sw.get(), ok, &log, OutputFormat::kJson);
  EXPECT_EQ(summary.packets, 5u);
  std::vector<nlohmann::json> lines;
  std::string line;
  std::istringstream in(log.str());
  while (std::getline(in, line)) lines.push_back(nlohmann::json::parse(line));
  ASSERT_EQ(lines.size(), 5u);
  for (int i = 0; i < 4; i++) EXPECT_EQ(lines[i]["verdict"], "drop");
  EXPECT_EQ(lines[4]["verdict"], "forward");
  EXPECT_EQ(lines[4]["out_ports"], nlohmann::json::array({2}));
  for (const char *k : {"pkt_seq", "verdict", "out_ports", "dscp",
                        "table_path", "state_transitions"})
    EXPECT_TRUE(lines[0].contains(k)) << k;
  EXPECT_EQ(lines[3]["state_transitions"][0]["to"], programs::knock::kOpen);

  auto dump = dump_state(*sw, summary.last_ts);
  ASSERT_EQ(dump.size(), 1u);
  EXPECT_EQ(dump[0]["state"], programs::knock::kOpen);
  EXPECT_EQ(dump[0]["key_hex"], "01020304");

  auto bad = instantiate(def);
  run_trace(bad.get(), load_trace(checks::source_path("traces/knock_bad.jsonl")),
            nullptr, OutputFormat::kJson);
  EXPECT_TRUE(dump_state(*bad, 10'000).empty());
}

TEST(Runner, EmptyTrace) {
  auto sw = instantiate(programs::port_knocking());
  std::ostringstream log;
  auto s = run_trace(sw.get(), load_trace(checks::source_path("traces/empty.jsonl")),
                     &log, OutputFormat::kJson);
  EXPECT_EQ(s.packets, 0u);
  EXPECT_TRUE(log.str().empty());
  EXPECT_EQ(dump_state(*sw, 0), nlohmann::json::array());
}

TEST(Runner, PortOutsideSwitch) {
  auto sw = instantiate(programs::port_knocking());
  auto t = parse_trace("{\"port\": 9, \"ts\": 1}\n");
  auto e = error_of([&] { run_trace(sw.get(), t, nullptr, OutputFormat::kJson); });
  EXPECT_EQ(e.code(), ErrorCode::kSchemaError);
  EXPECT_THAT(e.what(), HasSubstr("packet 1"));
}

TEST(Runner, ReplayIsByteIdentical) {
  TraceGenSpec s;
  s.packets = 2000;
  auto trace = parse_trace(gen_trace(s));
  std::string logs[2], dumps[2];
  for (int i = 0; i < 2; i++) {
    auto sw = instantiate(programs::mac_learning(4));
    std::ostringstream log;
    auto sum = run_trace(sw.get(), trace, &log, OutputFormat::kText);
    logs[i] = log.str();
    dumps[i] = dump_state_text(*sw, sum.last_ts);
  }
  EXPECT_EQ(logs[0], logs[1]);
  EXPECT_EQ(dumps[0], dumps[1]);
  EXPECT_FALSE(logs[0].empty());
}

TEST(Runner, DumpShowsRollbackState) {
  auto def = programs::mac_learning(2);
  def.tables[0].states.push_back({{0xb}, 2, 100, 1});
  def.tables[0].states.push_back({{0xc}, 2, 100, kDefaultState});
  auto sw = instantiate(def);
  auto before = dump_state(*sw, 50);
  ASSERT_EQ(before.size(), 2u);
  auto after = dump_state(*sw, 150);
  ASSERT_EQ(after.size(), 1u);
  EXPECT_EQ(after[0]["state"], 1);
  EXPECT_EQ(after[0]["timeout_us"], 0);
}

TEST(Mpls, TwoEdgeSwitches) {
  programs::MplsLearningConfig a_cfg, b_cfg;
  a_cfg.edge_ports = b_cfg.edge_ports = {1, 2};
  a_cfg.self_id = 1;
  a_cfg.switch_ids = {2};
  b_cfg.self_id = 2;
  b_cfg.switch_ids = {1};
  auto a = instantiate(programs::mpls_learning(a_cfg));
  auto b = instantiate(programs::mpls_learning(b_cfg));
  const uint32_t transport = 3;
  const uint64_t h1 = 0x11, h2 = 0x22;  // h1 on a:1, h2 on b:2
  uint64_t now = 0;

  // Carries one frame from an edge port of `from` across the transport link.
  auto cross = [&](Switch *from, Switch *to, uint32_t edge, uint64_t src,
                   uint64_t dst, uint32_t want_label) {
    FrameSpec f;
    f.eth_src = src;
    f.eth_dst = dst;
    f.ipv4 = FrameSpec::Ipv4{};
    auto out = from->submit(build_frame(f), edge, now++);
    EXPECT_EQ(out.out_ports, std::vector<uint32_t>{transport});
    EXPECT_EQ(parse(out.bytes, transport).get(FieldId::kMplsLabel), want_label);
    auto in = to->submit(out.bytes, transport, now++);
    EXPECT_FALSE(parse(in.bytes, 1).get(FieldId::kMplsLabel).has_value());
    return in.out_ports;
  };

  // unknown destination: broadcast label, flooded on the far edge
  EXPECT_EQ(cross(a.get(), b.get(), 1, h1, h2, programs::mpls_label(0, 1)),
            (std::vector<uint32_t>{1, 2}));
  // b learned h1 behind switch 1, a learned h1 on port 1
  EXPECT_EQ(cross(b.get(), a.get(), 2, h2, h1, programs::mpls_label(1, 2)),
            std::vector<uint32_t>{1});
  EXPECT_EQ(cross(a.get(), b.get(), 1, h1, h2, programs::mpls_label(2, 1)),
            std::vector<uint32_t>{2});

  auto &t = a->table(0);
  uint64_t k1[1] = {h1}, k2[1] = {h2};
  EXPECT_EQ(t.states().peek(t.lookup_scope()->make_key(k1), now),
            programs::mpls_state(1, 0));
  EXPECT_EQ(t.states().peek(t.lookup_scope()->make_key(k2), now),
            programs::mpls_state(0, 2));
}

TEST(Mpls, ConfigValidation) {
  programs::MplsLearningConfig c;
  EXPECT_EQ(error_of([&] { programs::mpls_learning(c); }).code(),
            ErrorCode::kInvalidArgument);
  c.edge_ports = {1, 2};
  c.switch_ids = {1024};
  EXPECT_EQ(error_of([&] { programs::mpls_learning(c); }).code(),
            ErrorCode::kInvalidArgument);
  c.switch_ids = {2};
  c.transport_port = 2;
  EXPECT_EQ(error_of([&] { programs::mpls_learning(c); }).code(),
            ErrorCode::kInvalidArgument);
}

TEST(MacLearning, TwoPortSwitchAgainstOracle) {
  auto r = checks::mac_learning(10, 1000);
  EXPECT_TRUE(r.pass) << r.detail;
}

TEST(PortKnocking, AllSequencePairs) {
  auto r = checks::knock_machine();
  EXPECT_TRUE(r.pass) << r.detail;
}

}  // namespace
}  // namespace xfsm
