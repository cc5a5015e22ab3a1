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

#ifndef XFSM_STATEFUL_BLOCK_H_
#define XFSM_STATEFUL_BLOCK_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "packet.h"
#include "scope.h"
#include "state_table.h"
#include "ternary.h"

namespace xfsm {

struct StateMatch {
  enum class Kind { kAny, kLabel, kNull };
  Kind kind{Kind::kAny};
  StateLabel value{0};
  StateLabel mask{0xffffffff};

  static StateMatch any() { return {}; }
  static StateMatch label(StateLabel v, StateLabel m = 0xffffffff) {
    return {Kind::kLabel, v & m, m};
  }
  static StateMatch null_state() { return {Kind::kNull, 0, 0}; }

  bool matches(State s) const;
  bool operator==(const StateMatch &) const = default;
};

struct FieldMatch {
  FieldId field;
  uint64_t value;
  uint64_t mask;

  static FieldMatch exact(FieldId f, uint64_t v) {
    return {f, v, field_max(f)};
  }
  bool operator==(const FieldMatch &) const = default;
};

namespace action {
struct Drop {
  bool operator==(const Drop &) const = default;
};
struct Output {
  uint32_t port;
  bool operator==(const Output &) const = default;
};
// Output port taken from the looked-up state label.
struct OutputToState {
  bool operator==(const OutputToState &) const = default;
};
struct Flood {
  bool operator==(const Flood &) const = default;
};
struct SetField {
  FieldId field;
  uint64_t value;
  bool operator==(const SetField &) const = default;
};
struct PushLabel {
  uint32_t label;
  bool operator==(const PushLabel &) const = default;
};
struct PopLabel {
  bool operator==(const PopLabel &) const = default;
};
struct Meter {
  uint32_t meter_id;
  bool operator==(const Meter &) const = default;
};
}  // namespace action

using Action =
    std::variant<action::Drop, action::Output, action::OutputToState,
                 action::Flood, action::SetField, action::PushLabel,
                 action::PopLabel, action::Meter>;

struct SetState {
  StateLabel next{kDefaultState};
  uint64_t timeout_us{0};
  StateLabel to_state{kDefaultState};
  // Bits of the update key's current label replaced by `next`; the rest are
  // kept (read-modify-write of composite labels).
  StateLabel mask{0xffffffff};
  // Parametric next state: the value of this packet field.
  std::optional<FieldId> next_from_field;
  std::optional<ScopeSpec> update_scope;

  bool operator==(const SetState &) const = default;
};

struct XfsmEntry {
  StateMatch state;
  std::vector<FieldMatch> match;
  std::vector<Action> actions;
  std::optional<SetState> set_state;
  std::optional<uint8_t> goto_table;
  uint32_t priority{0};

  bool operator==(const XfsmEntry &) const = default;
};

struct StateTransition {
  uint8_t table;
  FlowKey key;
  StateLabel from;
  StateLabel to;
};

struct BlockResult {
  bool matched{false};
  State state{State::of(kDefaultState)};
  bool drop{false};
  bool flood{false};
  std::vector<uint32_t> outputs;
  std::optional<uint8_t> goto_table;
  std::optional<StateTransition> transition;
  std::vector<std::string> warnings;
};

// Hooks the block needs from the enclosing switch.
class ActionContext {
 public:
  virtual ~ActionContext() = default;
  virtual void apply_meter(uint32_t meter_id, ParsedPacket *pkt,
                           uint64_t now) = 0;
};

struct BlockOptions {
  bool stateful{true};
  std::size_t xfsm_capacity{128};
  StateTableGeometry state_geometry{};
};

struct BlockCounters {
  uint64_t packets{0};
  uint64_t matched{0};
  uint64_t missed{0};
  uint64_t null_update_key{0};
  uint64_t state_writes{0};
};

// One state table, one XFSM table and two scopes. process() runs state
// lookup, XFSM match, actions, then the state update.
class StatefulBlock {
 public:
  // state(4) | flags(1) | field presence bitmap(2) | fields in catalog order
  static constexpr std::size_t kXfsmKeyBytes = 55;
  using XfsmKey = std::array<uint8_t, kXfsmKeyBytes>;

  explicit StatefulBlock(uint8_t table_id, BlockOptions options = {});

  uint8_t table_id() const { return table_id_; }
  bool stateful() const { return stateful_; }
  void set_stateful(bool stateful);

  // Changing a scope while the state table holds entries throws
  // Error{kStateTableNotEmpty}; re-setting the same scope is a no-op.
  void set_lookup_scope(ScopeSpec scope);
  void set_update_scope(ScopeSpec scope);
  const std::optional<ScopeSpec> &lookup_scope() const { return lookup_; }
  // The update scope in effect (defaults to the lookup scope).
  const std::optional<ScopeSpec> &update_scope() const {
    return update_ ? update_ : lookup_;
  }

  EntryHandle install_entry(XfsmEntry entry);
  void remove_entry(EntryHandle handle);
  void clear_entries();
  std::size_t entry_count() const { return xfsm_.size(); }
  std::vector<XfsmEntry> entries() const;

  // Throws Error{kNoDefaultEntry} / Error{kIncompatibleScopes} /
  // Error{kInvalidScope}.
  void activate();
  bool active() const { return active_; }

  BlockResult process(ParsedPacket *pkt, uint64_t now, ActionContext *ctx);

  // XFSM match only, for a given state; no side effects.
  const XfsmEntry *match(State state, const ParsedPacket &pkt) const;

  StateTable &states() { return states_; }
  const StateTable &states() const { return states_; }
  const BlockCounters &counters() const { return counters_; }

 private:
  struct Installed {
    EntryHandle handle;
    XfsmEntry entry;
  };

  TernaryPattern to_pattern(const XfsmEntry &entry) const;
  XfsmKey build_key(State state, const ParsedPacket &pkt) const;
  void rebuild();

  uint8_t table_id_;
  bool stateful_;
  bool active_{false};
  std::optional<ScopeSpec> lookup_;
  std::optional<ScopeSpec> update_;
  TernaryTable<Installed> xfsm_;
  StateTable states_;
  EntryHandle next_handle_{0};
  BlockCounters counters_;
};

const char *action_name(const Action &a);

}  // namespace xfsm

#endif  // XFSM_STATEFUL_BLOCK_H_
