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

#include "control.h"

#include <algorithm>
#include <string>

#include "error.h"

namespace xfsm {

namespace {

std::vector<uint8_t> be_bytes(uint64_t v, std::size_t n) {
  std::vector<uint8_t> out(n);
  for (std::size_t i = 0; i < n; i++)
    out[i] = static_cast<uint8_t>(v >> (8 * (n - 1 - i)));
  return out;
}

uint64_t from_be(const std::vector<uint8_t> &b) {
  uint64_t v = 0;
  for (auto c : b) v = (v << 8) | c;
  return v;
}

[[noreturn]] void no_wire_form(const std::string &what) {
  throw Error(ErrorCode::kInvalidArgument, what + " has no wire encoding");
}

wire::OxmField basic_oxm(FieldId f, uint64_t value,
                         std::optional<uint64_t> mask) {
  wire::OxmField o;
  o.oxm_class = wire::kOxmClassBasic;
  o.field = field_info(f).oxm_field;
  std::size_t n = wire::oxm_value_len(o.oxm_class, o.field);
  o.value = be_bytes(value, n);
  if (mask) o.mask = be_bytes(*mask, n);
  return o;
}

FieldId oxm_to_field(uint8_t code) {
  auto f = field_from_oxm(code);
  if (!f)
    throw Error(ErrorCode::kInvalidScope,
                "unsupported OXM field " + std::to_string(code));
  return *f;
}

ScopeSpec scope_from_extractor(const wire::Extractor &x) {
  std::vector<FieldId> fields;
  for (auto code : x.fields) {
    if (code > 0xff)
      throw Error(ErrorCode::kInvalidScope,
                  "unsupported OXM field " + std::to_string(code));
    fields.push_back(oxm_to_field(static_cast<uint8_t>(code)));
  }
  return ScopeSpec(std::move(fields));
}

std::vector<FieldMatch> sorted(std::vector<FieldMatch> m) {
  std::sort(m.begin(), m.end(), [](const FieldMatch &a, const FieldMatch &b) {
    return field_index(a.field) < field_index(b.field);
  });
  return m;
}

// OpenFlow non-strict delete: every constraint of the request appears in
// the entry.
bool covers(const XfsmEntry &req, const XfsmEntry &e) {
  if (req.state.kind != StateMatch::Kind::kAny && !(req.state == e.state))
    return false;
  for (const auto &m : req.match)
    if (std::find(e.match.begin(), e.match.end(), m) == e.match.end())
      return false;
  return true;
}

bool same_rule(const XfsmEntry &a, const XfsmEntry &b) {
  return a.priority == b.priority && a.state == b.state &&
         sorted(a.match) == sorted(b.match);
}

void apply_state_mod(Switch *sw, const wire::StateMod &m, uint64_t now) {
  auto &block = sw->table(m.table_id);
  switch (m.command) {
    case wire::StateModCommand::kSetLookupExtractor:
    case wire::StateModCommand::kSetUpdateExtractor: {
      const auto *x = std::get_if<wire::Extractor>(&m.payload);
      if (!x) throw Error(ErrorCode::kBadMessage, "extractor payload missing");
      auto scope = scope_from_extractor(*x);
      if (m.command == wire::StateModCommand::kSetLookupExtractor)
        block.set_lookup_scope(std::move(scope));
      else
        block.set_update_scope(std::move(scope));
      if (!block.stateful()) block.set_stateful(true);
      return;
    }
    case wire::StateModCommand::kAddFlowState:
    case wire::StateModCommand::kDelFlowState: {
      const auto *e = std::get_if<wire::StateEntryWire>(&m.payload);
      if (!e) throw Error(ErrorCode::kBadMessage, "state entry missing");
      const auto &scope = block.lookup_scope();
      if (!scope)
        throw Error(ErrorCode::kInvalidScope,
                    "table " + std::to_string(m.table_id) +
                        " has no lookup scope");
      if (e->key.size() != scope->byte_width())
        throw Error(ErrorCode::kBadLength,
                    "key_len " + std::to_string(e->key.size()) +
                        " != scope width " +
                        std::to_string(scope->byte_width()));
      FlowKey key(scope->signature(), e->key);
      if (m.command == wire::StateModCommand::kAddFlowState)
        block.states().set_state(key, e->state, e->timeout, e->to_state, now);
      else
        block.states().del_state(key);
      return;
    }
  }
  throw Error(ErrorCode::kBadCommand, "state-mod command");
}

void apply_flow_mod(Switch *sw, const wire::FlowMod &fm) {
  auto &block = sw->table(fm.table_id);
  switch (fm.command) {
    case wire::kFlowAdd:
      block.install_entry(from_flow_mod(fm));
      return;
    case wire::kFlowDelete:
    case wire::kFlowDeleteStrict: {
      // Only the match part matters for deletion.
      wire::FlowMod match_only = fm;
      match_only.instructions.clear();
      XfsmEntry req = from_flow_mod(match_only);
      std::vector<XfsmEntry> keep;
      for (auto &e : block.entries()) {
        bool hit = fm.command == wire::kFlowDeleteStrict ? same_rule(req, e)
                                                         : covers(req, e);
        if (!hit) keep.push_back(std::move(e));
      }
      block.clear_entries();
      for (auto &e : keep) block.install_entry(std::move(e));
      return;
    }
    default:
      throw Error(ErrorCode::kBadCommand,
                  "flow-mod command " + std::to_string(fm.command));
  }
}

}  // namespace

Capabilities capabilities(const Switch &sw) {
  Capabilities caps;
  for (auto id : sw.table_ids()) {
    bool stateful = sw.table(id).stateful();
    caps.tables.push_back({id, stateful ? wire::kTableConfigStateful : 0u});
    if (stateful) caps.capabilities |= wire::kCapTableStateful;
  }
  return caps;
}

std::optional<wire::Message> apply(Switch *sw, const wire::Message &msg,
                                   uint64_t now) {
  return std::visit(
      [&](const auto &body) -> std::optional<wire::Message> {
        using T = std::decay_t<decltype(body)>;
        if constexpr (std::is_same_v<T, wire::StateMod>) {
          apply_state_mod(sw, body, now);
        } else if constexpr (std::is_same_v<T, wire::FlowMod>) {
          apply_flow_mod(sw, body);
        } else if constexpr (std::is_same_v<T, wire::TableMod>) {
          auto &block = sw->table(body.table_id);
          bool stateful = body.config & wire::kTableConfigStateful;
          if (stateful != block.stateful()) block.set_stateful(stateful);
        } else if constexpr (std::is_same_v<T, wire::FeaturesRequest>) {
          wire::FeaturesReply reply;
          reply.n_tables = static_cast<uint8_t>(sw->table_ids().size());
          reply.capabilities = capabilities(*sw).capabilities;
          return wire::Message{msg.xid, reply};
        } else {
          throw Error(ErrorCode::kBadMessage,
                      "features reply is not a switch-bound message");
        }
        return std::nullopt;
      },
      msg.body);
}

wire::FlowMod to_flow_mod(uint8_t table_id, const XfsmEntry &entry) {
  wire::FlowMod fm;
  fm.table_id = table_id;
  fm.command = wire::kFlowAdd;
  if (entry.priority > 0xffff) no_wire_form("priority above 65535");
  fm.priority = static_cast<uint16_t>(entry.priority);

  switch (entry.state.kind) {
    case StateMatch::Kind::kAny:
      break;
    case StateMatch::Kind::kLabel: {
      wire::OxmField o{wire::kOxmClassState, wire::kOxmStateLabel,
                       be_bytes(entry.state.value, 4), {}};
      if (entry.state.mask != 0xffffffff) o.mask = be_bytes(entry.state.mask, 4);
      fm.match.push_back(std::move(o));
      break;
    }
    case StateMatch::Kind::kNull:
      fm.match.push_back(
          {wire::kOxmClassState, wire::kOxmStateNull, {1}, {}});
      break;
  }
  for (const auto &m : entry.match) {
    std::optional<uint64_t> mask;
    if (m.mask != field_max(m.field)) mask = m.mask;
    fm.match.push_back(basic_oxm(m.field, m.value, mask));
  }

  wire::ApplyActionsInstruction apply;
  bool drop = false;
  for (std::size_t i = 0; i < entry.actions.size(); i++) {
    const auto &a = entry.actions[i];
    if (drop) no_wire_form("action after drop");
    if (const auto *m = std::get_if<action::Meter>(&a)) {
      if (i != 0) no_wire_form("meter after another action");
      fm.instructions.push_back(wire::MeterInstruction{m->meter_id});
    } else if (std::holds_alternative<action::Drop>(a)) {
      drop = true;
    } else if (const auto *o = std::get_if<action::Output>(&a)) {
      apply.actions.push_back(wire::OutputAction{o->port, 0});
    } else if (std::holds_alternative<action::OutputToState>(a)) {
      apply.actions.push_back(wire::OutputAction{wire::kPortState, 0});
    } else if (std::holds_alternative<action::Flood>(a)) {
      apply.actions.push_back(wire::OutputAction{wire::kPortFlood, 0});
    } else if (const auto *s = std::get_if<action::SetField>(&a)) {
      apply.actions.push_back(
          wire::SetFieldAction{basic_oxm(s->field, s->value, std::nullopt)});
    } else if (const auto *p = std::get_if<action::PushLabel>(&a)) {
      apply.actions.push_back(wire::PushMplsAction{ethertype::kMpls});
      if (p->label)
        apply.actions.push_back(wire::SetFieldAction{
            basic_oxm(FieldId::kMplsLabel, p->label, std::nullopt)});
    } else if (std::holds_alternative<action::PopLabel>(a)) {
      apply.actions.push_back(wire::PopMplsAction{ethertype::kIpv4});
    }
  }
  if (!apply.actions.empty()) fm.instructions.push_back(std::move(apply));
  if (drop) fm.instructions.push_back(wire::ClearActionsInstruction{});
  if (entry.set_state) {
    const auto &s = *entry.set_state;
    if (s.mask != 0xffffffff) no_wire_form("masked set-state");
    if (s.next_from_field) no_wire_form("parametric set-state");
    if (s.update_scope) no_wire_form("per-entry update scope");
    if (s.timeout_us > 0xffffffffull) no_wire_form("timeout above 2^32 us");
    fm.instructions.push_back(wire::SetStateInstruction{
        s.next, static_cast<uint32_t>(s.timeout_us), s.to_state});
  }
  if (entry.goto_table)
    fm.instructions.push_back(wire::GotoTableInstruction{*entry.goto_table});
  return fm;
}

XfsmEntry from_flow_mod(const wire::FlowMod &fm) {
  XfsmEntry e;
  e.priority = fm.priority;
  for (const auto &o : fm.match) {
    if (o.oxm_class == wire::kOxmClassState) {
      if (o.field == wire::kOxmStateLabel) {
        auto v = static_cast<StateLabel>(from_be(o.value));
        StateLabel m = o.mask.empty() ? 0xffffffff
                                      : static_cast<StateLabel>(from_be(o.mask));
        if (v & ~m)
          throw Error(ErrorCode::kInvalidPattern, "state value outside mask");
        e.state = StateMatch::label(v, m);
      } else if (o.field == wire::kOxmStateNull) {
        e.state = StateMatch::null_state();
      } else {
        throw Error(ErrorCode::kBadMessage,
                    "unknown state OXM field " + std::to_string(o.field));
      }
      continue;
    }
    if (o.oxm_class != wire::kOxmClassBasic)
      throw Error(ErrorCode::kBadMessage,
                  "unsupported OXM class " + std::to_string(o.oxm_class));
    FieldId f = oxm_to_field(o.field);
    uint64_t v = from_be(o.value);
    uint64_t m = o.mask.empty() ? field_max(f) : from_be(o.mask);
    if (v > field_max(f) || m > field_max(f))
      throw Error(ErrorCode::kValueOverflow,
                  "value too wide for " + std::string(field_info(f).name));
    e.match.push_back({f, v, m});
  }

  for (const auto &instr : fm.instructions) {
    if (const auto *m = std::get_if<wire::MeterInstruction>(&instr)) {
      e.actions.insert(e.actions.begin(), action::Meter{m->meter_id});
    } else if (const auto *a = std::get_if<wire::ApplyActionsInstruction>(&instr)) {
      for (const auto &wa : a->actions) {
        if (const auto *o = std::get_if<wire::OutputAction>(&wa)) {
          if (o->port == wire::kPortFlood)
            e.actions.push_back(action::Flood{});
          else if (o->port == wire::kPortState)
            e.actions.push_back(action::OutputToState{});
          else
            e.actions.push_back(action::Output{o->port});
        } else if (std::holds_alternative<wire::PushMplsAction>(wa)) {
          e.actions.push_back(action::PushLabel{0});
        } else if (std::holds_alternative<wire::PopMplsAction>(wa)) {
          e.actions.push_back(action::PopLabel{});
        } else if (const auto *s = std::get_if<wire::SetFieldAction>(&wa)) {
          if (s->field.oxm_class != wire::kOxmClassBasic)
            throw Error(ErrorCode::kBadMessage, "set_field on a non-basic OXM");
          FieldId f = oxm_to_field(s->field.field);
          uint64_t v = from_be(s->field.value);
          if (v > field_max(f))
            throw Error(ErrorCode::kValueOverflow,
                        "value too wide for " + std::string(field_info(f).name));
          auto *push = e.actions.empty()
                           ? nullptr
                           : std::get_if<action::PushLabel>(&e.actions.back());
          if (f == FieldId::kMplsLabel && push && push->label == 0)
            push->label = static_cast<uint32_t>(v);
          else
            e.actions.push_back(action::SetField{f, v});
        }
      }
    } else if (std::holds_alternative<wire::ClearActionsInstruction>(instr)) {
      e.actions.push_back(action::Drop{});
    } else if (const auto *s = std::get_if<wire::SetStateInstruction>(&instr)) {
      SetState ss;
      ss.next = s->state;
      ss.timeout_us = s->timeout;
      ss.to_state = s->to_state;
      e.set_state = ss;
    } else if (const auto *g = std::get_if<wire::GotoTableInstruction>(&instr)) {
      e.goto_table = g->table_id;
    }
  }
  return e;
}

wire::Message set_extractor(uint8_t table_id, bool lookup,
                            const ScopeSpec &scope) {
  wire::StateMod m;
  m.table_id = table_id;
  m.command = lookup ? wire::StateModCommand::kSetLookupExtractor
                     : wire::StateModCommand::kSetUpdateExtractor;
  wire::Extractor x;
  for (auto f : scope.fields()) x.fields.push_back(field_info(f).oxm_field);
  m.payload = std::move(x);
  return wire::Message{0, m};
}

}  // namespace xfsm
