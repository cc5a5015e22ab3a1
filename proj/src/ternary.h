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

#ifndef XFSM_TERNARY_H_
#define XFSM_TERNARY_H_

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "error.h"

namespace xfsm {

// value/mask bit strings of `width` bits, most significant bit first. Bits
// past `width` in the last byte must be zero in both.
class TernaryPattern {
 public:
  TernaryPattern(std::size_t width, std::vector<uint8_t> value,
                 std::vector<uint8_t> mask);

  static TernaryPattern exact(std::size_t width, std::vector<uint8_t> value);
  static TernaryPattern any(std::size_t width);

  std::size_t width() const { return width_; }
  std::size_t byte_width() const { return value_.size(); }
  const std::vector<uint8_t> &value() const { return value_; }
  const std::vector<uint8_t> &mask() const { return mask_; }

  bool matches(std::span<const uint8_t> key) const;

  bool operator==(const TernaryPattern &) const = default;

 private:
  std::size_t width_;
  std::vector<uint8_t> value_;
  std::vector<uint8_t> mask_;
};

using EntryHandle = uint64_t;

namespace detail {

inline std::size_t words_for(std::size_t bytes) { return (bytes + 7) / 8; }

// Packs big-endian bytes into 64-bit words, zero-padded.
inline void pack_words(std::span<const uint8_t> bytes, uint64_t *out,
                       std::size_t nwords) {
  std::fill(out, out + nwords, 0);
  for (std::size_t i = 0; i < bytes.size(); i++)
    out[i / 8] |= uint64_t{bytes[i]} << (8 * (7 - i % 8));
}

}  // namespace detail

// Priority-resolved ternary match table. The match order is
// (priority descending, insertion order ascending); lookup returns the first
// entry in that order whose pattern covers the key.
template <typename Payload>
class TernaryTable {
 public:
  struct Entry {
    TernaryPattern pattern;
    uint32_t priority;
    uint64_t seq;
    Payload payload;
  };

  TernaryTable(std::size_t width, std::size_t capacity)
      : width_(width), bytes_((width + 7) / 8),
        nwords_(detail::words_for(bytes_)), capacity_(capacity) {
    if (width == 0)
      throw Error(ErrorCode::kInvalidPattern, "table width must be > 0");
  }

  std::size_t width() const { return width_; }
  std::size_t capacity() const { return capacity_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  EntryHandle insert(TernaryPattern pattern, uint32_t priority,
                     Payload payload) {
    if (pattern.width() != width_)
      throw Error(ErrorCode::kWidthMismatch,
                  "pattern width " + std::to_string(pattern.width()) +
                      " != table width " + std::to_string(width_));
    if (entries_.size() >= capacity_)
      throw Error(ErrorCode::kTableFull,
                  "ternary table full (" + std::to_string(capacity_) +
                      " entries)");
    uint64_t seq = next_seq_++;
    auto pos = std::upper_bound(
        entries_.begin(), entries_.end(), priority,
        [](uint32_t p, const Entry &e) { return p > e.priority; });
    auto idx = static_cast<std::size_t>(pos - entries_.begin());
    std::vector<uint64_t> words(2 * nwords_);
    detail::pack_words(pattern.value(), words.data(), nwords_);
    detail::pack_words(pattern.mask(), words.data() + nwords_, nwords_);
    words_.insert(words_.begin() + static_cast<std::ptrdiff_t>(idx * 2 * nwords_),
                  words.begin(), words.end());
    entries_.insert(pos, Entry{std::move(pattern), priority, seq,
                               std::move(payload)});
    return seq;
  }

  const Entry *lookup(std::span<const uint8_t> key) const {
    if (key.size() != bytes_)
      throw Error(ErrorCode::kWidthMismatch,
                  "key of " + std::to_string(key.size()) +
                      " bytes, table expects " + std::to_string(bytes_));
    constexpr std::size_t kInline = 16;
    std::array<uint64_t, kInline> inline_key;
    std::vector<uint64_t> heap_key;
    uint64_t *k = inline_key.data();
    if (nwords_ > kInline) {
      heap_key.resize(nwords_);
      k = heap_key.data();
    }
    detail::pack_words(key, k, nwords_);
    const uint64_t *w = words_.data();
    for (std::size_t i = 0; i < entries_.size(); i++, w += 2 * nwords_) {
      const uint64_t *value = w;
      const uint64_t *mask = w + nwords_;
      std::size_t j = 0;
      while (j < nwords_ && (k[j] & mask[j]) == value[j]) j++;
      if (j == nwords_) return &entries_[i];
    }
    return nullptr;
  }

  void remove(EntryHandle handle) {
    auto it = std::find_if(entries_.begin(), entries_.end(),
                           [handle](const Entry &e) { return e.seq == handle; });
    if (it == entries_.end())
      throw Error(ErrorCode::kUnknownHandle,
                  "no entry with handle " + std::to_string(handle));
    auto idx = static_cast<std::ptrdiff_t>(it - entries_.begin());
    auto stride = static_cast<std::ptrdiff_t>(2 * nwords_);
    words_.erase(words_.begin() + idx * stride,
                 words_.begin() + (idx + 1) * stride);
    entries_.erase(it);
  }

  const Entry *find(EntryHandle handle) const {
    for (const auto &e : entries_)
      if (e.seq == handle) return &e;
    return nullptr;
  }

  void clear() {
    entries_.clear();
    words_.clear();
  }

  // Entries in match order.
  const std::vector<Entry> &entries() const { return entries_; }

 private:
  std::size_t width_;
  std::size_t bytes_;
  std::size_t nwords_;
  std::size_t capacity_;
  uint64_t next_seq_{0};
  std::vector<Entry> entries_;
  std::vector<uint64_t> words_;  // value words then mask words, per entry
};

}  // namespace xfsm

#endif  // XFSM_TERNARY_H_
