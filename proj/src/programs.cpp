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

#include "programs.h"

#include <algorithm>

#include "error.h"

namespace xfsm {
namespace programs {

namespace {

SetState goto_state(StateLabel next, StateLabel mask = 0xffffffff) {
  SetState s;
  s.next = next;
  s.mask = mask;
  return s;
}

FieldMatch exact(FieldId f, uint64_t v) { return FieldMatch::exact(f, v); }

}  // namespace

ProgramDef mac_learning(uint32_t num_ports, bool parametric) {
  if (num_ports < 2)
    throw Error(ErrorCode::kInvalidArgument, "mac learning needs >= 2 ports");
  ProgramDef def;
  def.ports = num_ports;
  TableDef t;
  t.id = 0;
  t.stateful = true;
  t.lookup_scope = {FieldId::kEthDst};
  t.update_scope = {FieldId::kEthSrc};
  uint64_t full = static_cast<uint64_t>(num_ports + 1) * num_ports;
  t.xfsm_capacity = std::max<std::size_t>(128, full);
  if (!parametric) {
    for (StateLabel s = 0; s <= num_ports; s++) {
      for (uint32_t in = 1; in <= num_ports; in++) {
        XfsmEntry e;
        e.state = StateMatch::label(s);
        e.match = {exact(FieldId::kInPort, in)};
        if (s == kDefaultState)
          e.actions = {action::Flood{}};
        else
          e.actions = {action::Output{s}};
        e.set_state = goto_state(in);
        t.entries.push_back(std::move(e));
      }
    }
  } else {
    for (uint32_t in = 1; in <= num_ports; in++) {
      XfsmEntry e;
      e.priority = 1;
      e.state = StateMatch::label(kDefaultState);
      e.match = {exact(FieldId::kInPort, in)};
      e.actions = {action::Flood{}};
      e.set_state = goto_state(in);
      t.entries.push_back(std::move(e));
    }
    XfsmEntry e;
    e.priority = 0;
    e.actions = {action::OutputToState{}};
    SetState s;
    s.next_from_field = FieldId::kInPort;
    e.set_state = s;
    t.entries.push_back(std::move(e));
  }
  def.tables.push_back(std::move(t));
  return def;
}

ProgramDef mpls_learning(const MplsLearningConfig &cfg) {
  if (cfg.edge_ports.empty() || cfg.switch_ids.empty())
    throw Error(ErrorCode::kInvalidArgument,
                "mpls learning needs edge ports and switch ids");
  auto check_id = [](uint32_t id) {
    if (id == 0 || id > 0x3ff)
      throw Error(ErrorCode::kInvalidArgument,
                  "switch id " + std::to_string(id) + " outside [1, 1023]");
  };
  check_id(cfg.self_id);
  for (auto id : cfg.switch_ids) check_id(id);
  uint32_t top = *std::max_element(cfg.edge_ports.begin(), cfg.edge_ports.end());
  for (auto p : cfg.edge_ports)
    if (p == 0 || p > 0xffff)
      throw Error(ErrorCode::kInvalidArgument,
                  "edge port " + std::to_string(p) + " outside [1, 65535]");
  uint32_t transport = cfg.transport_port ? cfg.transport_port : top + 1;
  if (std::find(cfg.edge_ports.begin(), cfg.edge_ports.end(), transport) !=
      cfg.edge_ports.end())
    throw Error(ErrorCode::kInvalidArgument,
                "transport port is also an edge port");

  ProgramDef def;
  def.ports = std::max(top, transport);
  TableDef t;
  t.id = 0;
  t.stateful = true;
  t.lookup_scope = {FieldId::kEthDst};
  t.update_scope = {FieldId::kEthSrc};
  const StateLabel port_half = 0xffff0000;
  const StateLabel switch_half = 0x0000ffff;

  // Outbound: learn the edge port of eth_src, label toward the egress.
  for (auto p : cfg.edge_ports) {
    XfsmEntry flood;
    flood.state = StateMatch::label(0, switch_half);
    flood.match = {exact(FieldId::kInPort, p)};
    flood.actions = {action::PushLabel{mpls_label(0, cfg.self_id)},
                     action::Output{transport}};
    flood.set_state = goto_state(mpls_state(p, 0), port_half);
    t.entries.push_back(std::move(flood));
    for (auto s : cfg.switch_ids) {
      XfsmEntry fwd;
      fwd.state = StateMatch::label(s, switch_half);
      fwd.match = {exact(FieldId::kInPort, p)};
      fwd.actions = {action::PushLabel{mpls_label(s, cfg.self_id)},
                     action::Output{transport}};
      fwd.set_state = goto_state(mpls_state(p, 0), port_half);
      t.entries.push_back(std::move(fwd));
    }
  }
  // Inbound: learn the ingress switch of eth_src, deliver on the edge.
  for (auto s : cfg.switch_ids) {
    FieldMatch from_switch{FieldId::kMplsLabel, s, 0x3ff};
    XfsmEntry flood;
    flood.state = StateMatch::label(0, port_half);
    flood.match = {exact(FieldId::kInPort, transport), from_switch};
    flood.actions = {action::PopLabel{}, action::Flood{}};
    flood.set_state = goto_state(mpls_state(0, s), switch_half);
    t.entries.push_back(std::move(flood));
    for (auto p : cfg.edge_ports) {
      XfsmEntry fwd;
      fwd.state = StateMatch::label(mpls_state(p, 0), port_half);
      fwd.match = {exact(FieldId::kInPort, transport), from_switch};
      fwd.actions = {action::PopLabel{}, action::Output{p}};
      fwd.set_state = goto_state(mpls_state(0, s), switch_half);
      t.entries.push_back(std::move(fwd));
    }
  }
  t.xfsm_capacity = std::max<std::size_t>(128, t.entries.size());
  def.tables.push_back(std::move(t));
  return def;
}

ProgramDef port_knocking(uint32_t num_ports, uint32_t server_port) {
  using namespace knock;
  ProgramDef def;
  def.ports = num_ports;
  def.state_names = {{"STAGE1", kStage1},
                     {"STAGE2", kStage2},
                     {"STAGE3", kStage3},
                     {"OPEN", kOpen}};
  TableDef t;
  t.id = 0;
  t.stateful = true;
  t.lookup_scope = {FieldId::kIpSrc};
  t.update_scope = {FieldId::kIpSrc};
  const StateLabel chain[5] = {kDefault, kStage1, kStage2, kStage3, kOpen};
  // A knock is a TCP or UDP packet to the next port of the sequence.
  for (int i = 0; i < 4; i++) {
    for (FieldId port : {FieldId::kTcpDst, FieldId::kUdpDst}) {
      XfsmEntry e;
      e.priority = 10;
      e.state = StateMatch::label(chain[i]);
      e.match = {exact(port, kSequence[i])};
      e.actions = {action::Drop{}};
      e.set_state = goto_state(chain[i + 1]);
      t.entries.push_back(std::move(e));
    }
  }
  XfsmEntry open;
  open.priority = 10;
  open.state = StateMatch::label(kOpen);
  open.match = {exact(FieldId::kTcpDst, kServicePort)};
  open.actions = {action::Output{server_port}};
  t.entries.push_back(std::move(open));

  XfsmEntry stay_open;
  stay_open.priority = 5;
  stay_open.state = StateMatch::label(kOpen);
  stay_open.actions = {action::Drop{}};
  t.entries.push_back(std::move(stay_open));

  XfsmEntry no_ip;
  no_ip.priority = 5;
  no_ip.state = StateMatch::null_state();
  no_ip.actions = {action::Drop{}};
  t.entries.push_back(std::move(no_ip));

  XfsmEntry reset;
  reset.priority = 0;
  reset.actions = {action::Drop{}};
  reset.set_state = goto_state(kDefault);
  t.entries.push_back(std::move(reset));

  def.tables.push_back(std::move(t));
  return def;
}

ProgramDef ddos_mitigation(const DdosConfig &cfg) {
  using namespace ddos;
  if (cfg.destinations.empty())
    throw Error(ErrorCode::kInvalidArgument, "ddos needs destinations");
  ProgramDef def;
  def.ports = cfg.num_ports;
  def.state_names = {{"GREEN", kGreen}, {"YELLOW", kYellow}, {"RED", kRed}};

  TableDef t0, t1, t2, t3;
  t0.id = 0;
  t1.id = 1;
  t2.id = 2;
  t3.id = 3;
  for (std::size_t i = 0; i < cfg.destinations.size(); i++) {
    uint32_t dst = cfg.destinations[i];
    uint32_t m1 = static_cast<uint32_t>(i + 1);
    uint32_t m2 = kStage2MeterBase + m1;
    def.meters.push_back(
        {m1, MeterUnit::kPackets, {{cfg.stage1_rate, cfg.stage1_burst, kStage1Dscp}}});
    def.meters.push_back(
        {m2, MeterUnit::kPackets, {{cfg.stage2_rate, cfg.stage2_burst, kStage2Dscp}}});

    XfsmEntry e0;
    e0.priority = 10;
    e0.match = {exact(FieldId::kIpProto, ipproto::kTcp),
                exact(FieldId::kIpDst, dst)};
    e0.actions = {action::SetField{FieldId::kIpDscp, 0}, action::Meter{m1}};
    e0.goto_table = 1;
    t0.entries.push_back(std::move(e0));

    XfsmEntry e2;
    e2.match = {exact(FieldId::kIpDst, dst)};
    e2.actions = {action::Meter{m2}};
    e2.goto_table = 3;
    t2.entries.push_back(std::move(e2));
  }
  XfsmEntry pass;
  pass.priority = 0;
  pass.actions = {action::Output{cfg.out_port}};
  t0.entries.push_back(std::move(pass));

  auto entry = [&](StateLabel state, std::optional<uint8_t> dscp,
                   std::vector<Action> actions, std::optional<StateLabel> next,
                   std::optional<uint8_t> go) {
    XfsmEntry e;
    e.state = StateMatch::label(state);
    if (dscp) e.match = {exact(FieldId::kIpDscp, *dscp)};
    e.actions = std::move(actions);
    if (next) e.set_state = goto_state(*next);
    e.goto_table = go;
    return e;
  };
  const Action out = action::Output{cfg.out_port};
  const Action drop = action::Drop{};

  t1.stateful = true;
  t1.lookup_scope = {FieldId::kIpSrc, FieldId::kIpDst};
  t1.update_scope = t1.lookup_scope;
  t1.entries = {
      entry(kDefaultState, 0, {out}, kGreen, std::nullopt),
      entry(kDefaultState, kStage1Dscp, {}, kYellow, 2),
      entry(kGreen, std::nullopt, {out}, std::nullopt, std::nullopt),
      entry(kYellow, 0, {out}, kGreen, std::nullopt),
      entry(kYellow, kStage1Dscp, {}, kYellow, 2),
  };

  t3.stateful = true;
  t3.lookup_scope = t1.lookup_scope;
  t3.update_scope = t1.lookup_scope;
  t3.entries = {
      entry(kDefaultState, std::nullopt, {out}, kYellow, std::nullopt),
      entry(kYellow, kStage1Dscp, {out}, std::nullopt, std::nullopt),
      entry(kYellow, kStage2Dscp, {drop}, kRed, std::nullopt),
      entry(kRed, kStage2Dscp, {drop}, std::nullopt, std::nullopt),
      entry(kRed, kStage1Dscp, {out}, kYellow, std::nullopt),
  };

  def.tables = {std::move(t0), std::move(t1), std::move(t2), std::move(t3)};
  return def;
}

}  // namespace programs
}  // namespace xfsm
