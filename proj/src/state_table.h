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

#ifndef XFSM_STATE_TABLE_H_
#define XFSM_STATE_TABLE_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "scope.h"
#include "ternary.h"

namespace xfsm {

using StateLabel = uint32_t;
inline constexpr StateLabel kDefaultState = 0;

// Result of a state read: a 32-bit label, or NULL when the lookup scope
// fields were missing from the packet. NULL cannot be written.
class State {
 public:
  static constexpr State null() { return State(true, 0); }
  static constexpr State of(StateLabel label) { return State(false, label); }

  constexpr bool is_null() const { return null_; }
  constexpr StateLabel label() const { return label_; }

  bool operator==(const State &) const = default;

 private:
  constexpr State(bool null, StateLabel label) : null_(null), label_(label) { }
  bool null_;
  StateLabel label_;
};

struct StateEntry {
  FlowKey key;
  StateLabel state{kDefaultState};
  uint64_t timeout_us{0};  // 0 = permanent
  StateLabel to_state{kDefaultState};
  uint64_t written_at{0};

  bool expired(uint64_t now) const {
    return timeout_us != 0 && now >= written_at &&
           now - written_at >= timeout_us;
  }
  bool operator==(const StateEntry &) const = default;
};

struct StateTableGeometry {
  static constexpr std::size_t kWays = 4;
  std::size_t buckets{256};  // per subtable
  std::size_t cells{4};      // entries per bucket
  std::size_t exception_capacity{32};
  uint64_t hash_seed{0x5eed0fd1e57ab1e5ull};

  std::size_t capacity() const { return kWays * buckets * cells; }
};

// d-left hashed exact-match store (d = 4) backed by a ternary exception
// table over zero-padded key bytes. Expiry is lazy: timed entries are
// resolved when looked up, written over, or swept.
class StateTable {
 public:
  static constexpr std::size_t kWays = StateTableGeometry::kWays;
  static constexpr std::size_t kExceptionWidth = 8 * kMaxKeyBytes;

  explicit StateTable(StateTableGeometry geometry = {});

  // exact-unexpired > rollback > wildcard exception > DEFAULT.
  StateLabel lookup(const FlowKey &key, uint64_t now);
  // Same answer as lookup() without applying expiry to the table.
  StateLabel peek(const FlowKey &key, uint64_t now) const;

  // Writing DEFAULT with timeout 0 deletes. Throws Error{kTableFull} when
  // every candidate bucket is full of other keys.
  void set_state(const FlowKey &key, StateLabel state, uint64_t timeout_us,
                 StateLabel to_state, uint64_t now);
  void del_state(const FlowKey &key);

  EntryHandle add_exception(TernaryPattern pattern, uint32_t priority,
                            StateLabel state);
  void remove_exception(EntryHandle handle);

  void sweep(uint64_t now);
  // Drops exact entries; exceptions stay.
  void clear();

  std::size_t size() const { return size_; }
  std::size_t exception_count() const { return exceptions_.size(); }
  const StateTableGeometry &geometry() const { return geometry_; }

  // Raw entry, ignoring expiry.
  const StateEntry *find(const FlowKey &key) const;
  // Entries in storage order.
  std::vector<StateEntry> entries() const;
  const TernaryTable<StateLabel> &exceptions() const { return exceptions_; }

  std::array<std::size_t, kWays> candidate_buckets(const FlowKey &key) const;
  std::size_t bucket_load(std::size_t way, std::size_t bucket) const;

 private:
  using Slot = std::optional<StateEntry>;

  Slot *slot(std::size_t way, std::size_t bucket, std::size_t cell) {
    return &slots_[(way * geometry_.buckets + bucket) * geometry_.cells + cell];
  }
  const Slot *slot(std::size_t way, std::size_t bucket,
                   std::size_t cell) const {
    return &slots_[(way * geometry_.buckets + bucket) * geometry_.cells + cell];
  }
  Slot *locate(const FlowKey &key);
  const Slot *locate(const FlowKey &key) const;
  void erase(Slot *s);
  std::optional<StateLabel> exception_state(const FlowKey &key) const;

  StateTableGeometry geometry_;
  std::array<std::array<uint64_t, 8>, kWays> multipliers_{};
  std::array<uint64_t, kWays> offsets_{};
  std::vector<Slot> slots_;
  std::size_t size_{0};
  TernaryTable<StateLabel> exceptions_;
};

}  // namespace xfsm

#endif  // XFSM_STATE_TABLE_H_
