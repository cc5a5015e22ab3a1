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

#include "stateful_block.h"

#include <algorithm>
#include <type_traits>

#include "error.h"

namespace xfsm {

namespace {

constexpr std::size_t kStateOffset = 0;
constexpr std::size_t kFlagsOffset = 4;
constexpr std::size_t kPresenceOffset = 5;
constexpr std::size_t kFieldsOffset = 7;
constexpr uint8_t kNullFlag = 0x80;

constexpr std::size_t kKeyBits = StatefulBlock::kXfsmKeyBytes * 8;

std::size_t field_offset(FieldId f) {
  std::size_t off = kFieldsOffset;
  for (const auto &fi : all_fields()) {
    if (fi.id == f) return off;
    off += (fi.bits + 7) / 8;
  }
  return off;
}

void put_be(uint8_t *dst, std::size_t n, uint64_t v) {
  for (std::size_t i = 0; i < n; i++) {
    dst[n - 1 - i] = static_cast<uint8_t>(v & 0xff);
    v >>= 8;
  }
}

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void check_entry(const XfsmEntry &entry, uint8_t table_id) {
  std::vector<FieldId> seen;
  for (const auto &m : entry.match) {
    const auto &fi = field_info(m.field);
    if (std::find(seen.begin(), seen.end(), m.field) != seen.end())
      throw Error(ErrorCode::kInvalidEntry,
                  "field " + std::string(fi.name) + " matched twice");
    seen.push_back(m.field);
    if (m.mask > field_max(m.field) || m.value > field_max(m.field))
      throw Error(ErrorCode::kValueOverflow,
                  "match on " + std::string(fi.name) + " exceeds " +
                      std::to_string(fi.bits) + " bits");
    if (m.value & ~m.mask)
      throw Error(ErrorCode::kInvalidPattern,
                  "match on " + std::string(fi.name) +
                      " sets value bits outside its mask");
  }
  for (const auto &a : entry.actions) {
    if (const auto *sf = std::get_if<action::SetField>(&a)) {
      if (sf->value > field_max(sf->field))
        throw Error(ErrorCode::kValueOverflow,
                    "set_field value exceeds " +
                        std::string(field_info(sf->field).name) + " width");
    }
    if (const auto *pl = std::get_if<action::PushLabel>(&a)) {
      if (pl->label > field_max(FieldId::kMplsLabel))
        throw Error(ErrorCode::kValueOverflow, "MPLS label exceeds 20 bits");
    }
  }
  if (entry.goto_table && *entry.goto_table <= table_id)
    throw Error(ErrorCode::kInvalidEntry,
                "goto target " + std::to_string(*entry.goto_table) +
                    " must be greater than table " + std::to_string(table_id));
  if (entry.set_state && entry.set_state->next_from_field &&
      field_bits(*entry.set_state->next_from_field) > 32)
    throw Error(ErrorCode::kInvalidEntry,
                "parametric next state needs a field of at most 32 bits");
}

}  // namespace

bool StateMatch::matches(State s) const {
  switch (kind) {
    case Kind::kAny:
      return true;
    case Kind::kNull:
      return s.is_null();
    case Kind::kLabel:
      return !s.is_null() && (s.label() & mask) == value;
  }
  return false;
}

const char *action_name(const Action &a) {
  return std::visit(
      Overloaded{
          [](const action::Drop &) { return "drop"; },
          [](const action::Output &) { return "output"; },
          [](const action::OutputToState &) { return "output_state"; },
          [](const action::Flood &) { return "flood"; },
          [](const action::SetField &) { return "set_field"; },
          [](const action::PushLabel &) { return "push_label"; },
          [](const action::PopLabel &) { return "pop_label"; },
          [](const action::Meter &) { return "meter"; },
      },
      a);
}

StatefulBlock::StatefulBlock(uint8_t table_id, BlockOptions options)
    : table_id_(table_id), stateful_(options.stateful),
      xfsm_(kKeyBits, options.xfsm_capacity),
      states_(options.state_geometry) {
  static_assert(kXfsmKeyBytes == kFieldsOffset + 48,
                "XFSM key layout out of sync with the field catalog");
}

void StatefulBlock::set_stateful(bool stateful) {
  if (stateful == stateful_) return;
  stateful_ = stateful;
  rebuild();
  active_ = false;
}

void StatefulBlock::set_lookup_scope(ScopeSpec scope) {
  if (lookup_ && *lookup_ == scope) return;
  if (states_.size() != 0)
    throw Error(ErrorCode::kStateTableNotEmpty,
                "cannot change the lookup scope of table " +
                    std::to_string(table_id_) + " while it holds states");
  lookup_ = std::move(scope);
  active_ = false;
}

void StatefulBlock::set_update_scope(ScopeSpec scope) {
  if (update_ && *update_ == scope) return;
  if (states_.size() != 0)
    throw Error(ErrorCode::kStateTableNotEmpty,
                "cannot change the update scope of table " +
                    std::to_string(table_id_) + " while it holds states");
  update_ = std::move(scope);
  active_ = false;
}

TernaryPattern StatefulBlock::to_pattern(const XfsmEntry &entry) const {
  std::vector<uint8_t> value(kXfsmKeyBytes, 0);
  std::vector<uint8_t> mask(kXfsmKeyBytes, 0);
  if (stateful_) {
    switch (entry.state.kind) {
      case StateMatch::Kind::kAny:
        break;
      case StateMatch::Kind::kLabel:
        put_be(&value[kStateOffset], 4, entry.state.value & entry.state.mask);
        put_be(&mask[kStateOffset], 4, entry.state.mask);
        mask[kFlagsOffset] = kNullFlag;
        break;
      case StateMatch::Kind::kNull:
        value[kFlagsOffset] = kNullFlag;
        mask[kFlagsOffset] = kNullFlag;
        break;
    }
  }
  uint16_t presence = 0;
  for (const auto &m : entry.match) {
    presence |= static_cast<uint16_t>(1u << field_index(m.field));
    auto off = field_offset(m.field);
    auto n = field_bytes(m.field);
    put_be(&value[off], n, m.value & m.mask);
    put_be(&mask[off], n, m.mask);
  }
  put_be(&value[kPresenceOffset], 2, presence);
  put_be(&mask[kPresenceOffset], 2, presence);
  return TernaryPattern(kKeyBits, std::move(value), std::move(mask));
}

StatefulBlock::XfsmKey StatefulBlock::build_key(State state,
                                               const ParsedPacket &pkt) const {
  XfsmKey key{};
  if (stateful_) {
    if (state.is_null())
      key[kFlagsOffset] = kNullFlag;
    else
      put_be(&key[kStateOffset], 4, state.label());
  }
  uint16_t presence = 0;
  std::size_t off = kFieldsOffset;
  for (const auto &fi : all_fields()) {
    auto n = (fi.bits + 7) / 8;
    if (auto v = pkt.get(fi.id)) {
      presence |= static_cast<uint16_t>(1u << field_index(fi.id));
      put_be(&key[off], n, *v);
    }
    off += n;
  }
  put_be(&key[kPresenceOffset], 2, presence);
  return key;
}

EntryHandle StatefulBlock::install_entry(XfsmEntry entry) {
  check_entry(entry, table_id_);
  auto pattern = to_pattern(entry);
  auto handle = next_handle_;
  xfsm_.insert(std::move(pattern), entry.priority,
               Installed{handle, std::move(entry)});
  next_handle_++;
  active_ = false;
  return handle;
}

void StatefulBlock::remove_entry(EntryHandle handle) {
  for (const auto &e : xfsm_.entries()) {
    if (e.payload.handle == handle) {
      xfsm_.remove(e.seq);
      active_ = false;
      return;
    }
  }
  throw Error(ErrorCode::kUnknownHandle,
              "no XFSM entry with handle " + std::to_string(handle));
}

void StatefulBlock::clear_entries() {
  xfsm_.clear();
  active_ = false;
}

std::vector<XfsmEntry> StatefulBlock::entries() const {
  // Installation order, which is what a program file round-trips.
  std::vector<const Installed *> sorted;
  for (const auto &e : xfsm_.entries()) sorted.push_back(&e.payload);
  std::sort(sorted.begin(), sorted.end(),
            [](const Installed *a, const Installed *b) {
              return a->handle < b->handle;
            });
  std::vector<XfsmEntry> out;
  for (const auto *i : sorted) out.push_back(i->entry);
  return out;
}

void StatefulBlock::rebuild() {
  std::vector<Installed> ordered;
  for (const auto &e : xfsm_.entries()) ordered.push_back(e.payload);
  std::sort(ordered.begin(), ordered.end(),
            [](const Installed &a, const Installed &b) {
              return a.handle < b.handle;
            });
  TernaryTable<Installed> fresh(kKeyBits, xfsm_.capacity());
  for (auto &i : ordered) {
    auto pattern = to_pattern(i.entry);
    auto priority = i.entry.priority;
    fresh.insert(std::move(pattern), priority, std::move(i));
  }
  xfsm_ = std::move(fresh);
}

void StatefulBlock::activate() {
  if (stateful_) {
    if (!lookup_)
      throw Error(ErrorCode::kInvalidScope,
                  "stateful table " + std::to_string(table_id_) +
                      " has no lookup scope");
    const auto &update = update_scope();
    if (!lookup_->compatible_with(*update))
      throw Error(ErrorCode::kIncompatibleScopes,
                  "lookup scope [" + lookup_->to_string() +
                      "] and update scope [" + update->to_string() +
                      "] have different field widths");
    bool has_default = false;
    for (const auto &e : xfsm_.entries()) {
      const auto &entry = e.payload.entry;
      if (entry.state.matches(State::of(kDefaultState))) has_default = true;
      if (entry.set_state && entry.set_state->update_scope &&
          !lookup_->compatible_with(*entry.set_state->update_scope))
        throw Error(ErrorCode::kIncompatibleScopes,
                    "per-entry update scope [" +
                        entry.set_state->update_scope->to_string() +
                        "] is incompatible with lookup scope [" +
                        lookup_->to_string() + "]");
    }
    if (!has_default)
      throw Error(ErrorCode::kNoDefaultEntry,
                  "table " + std::to_string(table_id_) +
                      " has no XFSM entry for the DEFAULT state");
  }
  active_ = true;
}

const XfsmEntry *StatefulBlock::match(State state,
                                      const ParsedPacket &pkt) const {
  auto key = build_key(state, pkt);
  const auto *hit = xfsm_.lookup(key);
  return hit ? &hit->payload.entry : nullptr;
}

BlockResult StatefulBlock::process(ParsedPacket *pkt, uint64_t now,
                                   ActionContext *ctx) {
  if (!active_) activate();
  BlockResult result;
  counters_.packets++;

  // 1. state lookup
  if (stateful_) {
    auto key = lookup_->extract(*pkt);
    result.state =
        key ? State::of(states_.lookup(*key, now)) : State::null();
  }

  // 2. XFSM transition
  const XfsmEntry *entry = match(result.state, *pkt);
  if (!entry) {
    counters_.missed++;
    result.drop = true;
    result.warnings.push_back("no XFSM entry matched in table " +
                              std::to_string(table_id_));
    return result;
  }
  counters_.matched++;
  result.matched = true;

  // 3. actions, in order; drop ends the list
  for (const auto &a : entry->actions) {
    if (std::holds_alternative<action::Drop>(a)) {
      result.drop = true;
      break;
    }
    try {
      std::visit(
          Overloaded{
              [](const action::Drop &) {},
              [&](const action::Output &o) {
                result.outputs.push_back(o.port);
              },
              [&](const action::OutputToState &) {
                if (!result.state.is_null() &&
                    result.state.label() != kDefaultState)
                  result.outputs.push_back(result.state.label());
              },
              [&](const action::Flood &) { result.flood = true; },
              [&](const action::SetField &sf) {
                pkt->set(sf.field, sf.value);
              },
              [&](const action::PushLabel &pl) { pkt->push_label(pl.label); },
              [&](const action::PopLabel &) { pkt->pop_label(); },
              [&](const action::Meter &m) {
                if (ctx) ctx->apply_meter(m.meter_id, pkt, now);
              },
          },
          a);
    } catch (const Error &e) {
      result.warnings.push_back(std::string(action_name(a)) +
                                " skipped: " + e.what());
    }
  }

  // 4. state update, after the actions
  if (stateful_ && entry->set_state) {
    const auto &ss = *entry->set_state;
    const auto &scope = ss.update_scope ? ss.update_scope : update_scope();
    auto ukey = scope->extract(*pkt);
    std::optional<uint64_t> param;
    if (ss.next_from_field) param = pkt->get(*ss.next_from_field);
    if (!ukey) {
      counters_.null_update_key++;
      result.warnings.push_back("update scope [" + scope->to_string() +
                                "] absent from packet; state not written");
    } else if (ss.next_from_field && !param) {
      result.warnings.push_back("parametric next state field absent; "
                                "state not written");
    } else {
      StateLabel prev = states_.lookup(*ukey, now);
      StateLabel next =
          param ? static_cast<StateLabel>(*param) : ss.next;
      next = (prev & ~ss.mask) | (next & ss.mask);
      try {
        states_.set_state(*ukey, next, ss.timeout_us, ss.to_state, now);
        counters_.state_writes++;
        if (prev != next)
          result.transition = StateTransition{table_id_, *ukey, prev, next};
      } catch (const Error &e) {
        result.warnings.push_back(std::string("state write failed: ") +
                                  e.what());
      }
    }
  }

  if (!result.drop) result.goto_table = entry->goto_table;
  return result;
}

}  // namespace xfsm
