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

#include "state_table.h"

#include <string>

#include "error.h"

namespace xfsm {

namespace {

uint64_t splitmix64(uint64_t *state) {
  uint64_t z = (*state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace

StateTable::StateTable(StateTableGeometry geometry)
    : geometry_(geometry),
      exceptions_(kExceptionWidth, geometry.exception_capacity) {
  if (geometry_.buckets == 0 || geometry_.cells == 0)
    throw Error(ErrorCode::kInvalidArgument,
                "state table needs at least one bucket and one cell");
  uint64_t s = geometry_.hash_seed;
  for (std::size_t w = 0; w < kWays; w++) {
    for (auto &m : multipliers_[w]) m = splitmix64(&s) | 1;
    offsets_[w] = splitmix64(&s);
  }
  slots_.resize(kWays * geometry_.buckets * geometry_.cells);
}

std::array<std::size_t, StateTable::kWays> StateTable::candidate_buckets(
    const FlowKey &key) const {
  // Multiply-add vector hashing over the padded key, its length and its
  // scope signature; independent coefficients per subtable.
  std::array<uint64_t, 8> words{};
  const auto &p = key.padded();
  for (std::size_t i = 0; i < kMaxKeyBytes; i++)
    words[i / 8] |= uint64_t{p[i]} << (8 * (7 - i % 8));
  words[6] = key.size();
  words[7] = key.signature();
  std::array<std::size_t, kWays> out{};
  for (std::size_t w = 0; w < kWays; w++) {
    uint64_t h = offsets_[w];
    for (std::size_t i = 0; i < words.size(); i++)
      h += multipliers_[w][i] * words[i];
    h ^= h >> 29;
    out[w] = static_cast<std::size_t>(
        ((h >> 32) * static_cast<uint64_t>(geometry_.buckets)) >> 32);
  }
  return out;
}

std::size_t StateTable::bucket_load(std::size_t way, std::size_t bucket) const {
  std::size_t n = 0;
  for (std::size_t c = 0; c < geometry_.cells; c++)
    if (slot(way, bucket, c)->has_value()) n++;
  return n;
}

StateTable::Slot *StateTable::locate(const FlowKey &key) {
  auto buckets = candidate_buckets(key);
  for (std::size_t w = 0; w < kWays; w++) {
    for (std::size_t c = 0; c < geometry_.cells; c++) {
      auto *s = slot(w, buckets[w], c);
      if (*s && (*s)->key == key) return s;
    }
  }
  return nullptr;
}

const StateTable::Slot *StateTable::locate(const FlowKey &key) const {
  return const_cast<StateTable *>(this)->locate(key);
}

void StateTable::erase(Slot *s) {
  if (*s) {
    s->reset();
    size_--;
  }
}

std::optional<StateLabel> StateTable::exception_state(
    const FlowKey &key) const {
  if (exceptions_.empty()) return std::nullopt;
  const auto *e = exceptions_.lookup(key.padded());
  if (!e) return std::nullopt;
  return e->payload;
}

StateLabel StateTable::lookup(const FlowKey &key, uint64_t now) {
  if (auto *s = locate(key)) {
    auto &e = **s;
    if (!e.expired(now)) return e.state;
    if (e.to_state != kDefaultState) {
      e.written_at += e.timeout_us;
      e.state = e.to_state;
      e.timeout_us = 0;
      return e.state;
    }
    erase(s);
  }
  return exception_state(key).value_or(kDefaultState);
}

StateLabel StateTable::peek(const FlowKey &key, uint64_t now) const {
  if (const auto *s = locate(key)) {
    const auto &e = **s;
    if (!e.expired(now)) return e.state;
    if (e.to_state != kDefaultState) return e.to_state;
  }
  return exception_state(key).value_or(kDefaultState);
}

void StateTable::set_state(const FlowKey &key, StateLabel state,
                           uint64_t timeout_us, StateLabel to_state,
                           uint64_t now) {
  if (state == kDefaultState && timeout_us == 0) {
    del_state(key);
    return;
  }
  StateEntry entry{key, state, timeout_us, to_state, now};
  if (auto *s = locate(key)) {
    **s = entry;
    return;
  }
  auto buckets = candidate_buckets(key);
  Slot *target = nullptr;
  std::size_t best_load = geometry_.cells;
  for (std::size_t w = 0; w < kWays; w++) {
    std::size_t load = 0;
    Slot *free_cell = nullptr;
    for (std::size_t c = 0; c < geometry_.cells; c++) {
      auto *s = slot(w, buckets[w], c);
      // An entry that expired to DEFAULT is logically absent.
      if (*s && (*s)->expired(now) && (*s)->to_state == kDefaultState)
        erase(s);
      if (*s)
        load++;
      else if (!free_cell)
        free_cell = s;
    }
    if (free_cell && load < best_load) {
      best_load = load;
      target = free_cell;
    }
  }
  if (!target)
    throw Error(ErrorCode::kTableFull,
                "all " + std::to_string(kWays) +
                    " candidate buckets full for key " + key.hex());
  *target = entry;
  size_++;
}

void StateTable::del_state(const FlowKey &key) {
  if (auto *s = locate(key)) erase(s);
}

EntryHandle StateTable::add_exception(TernaryPattern pattern,
                                      uint32_t priority, StateLabel state) {
  return exceptions_.insert(std::move(pattern), priority, state);
}

void StateTable::remove_exception(EntryHandle handle) {
  exceptions_.remove(handle);
}

void StateTable::sweep(uint64_t now) {
  for (auto &s : slots_) {
    if (!s || !s->expired(now)) continue;
    if (s->to_state == kDefaultState) {
      erase(&s);
    } else {
      s->written_at += s->timeout_us;
      s->state = s->to_state;
      s->timeout_us = 0;
    }
  }
}

void StateTable::clear() {
  for (auto &s : slots_) s.reset();
  size_ = 0;
}

const StateEntry *StateTable::find(const FlowKey &key) const {
  const auto *s = locate(key);
  return s ? &**s : nullptr;
}

std::vector<StateEntry> StateTable::entries() const {
  std::vector<StateEntry> out;
  out.reserve(size_);
  for (const auto &s : slots_)
    if (s) out.push_back(*s);
  return out;
}

}  // namespace xfsm
