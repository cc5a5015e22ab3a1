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

#ifndef XFSM_SCOPE_H_
#define XFSM_SCOPE_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "packet.h"

namespace xfsm {

inline constexpr std::size_t kMaxKeyBytes = 48;

// Concatenated scope field values. Keys built from scopes with the same
// per-field byte widths carry the same signature and compare by bytes.
class FlowKey {
 public:
  FlowKey() = default;
  FlowKey(uint64_t signature, std::span<const uint8_t> bytes);

  std::span<const uint8_t> bytes() const { return {data_.data(), len_}; }
  std::size_t size() const { return len_; }
  uint64_t signature() const { return signature_; }
  // Zero-padded to kMaxKeyBytes, the layout wildcard exceptions match on.
  const std::array<uint8_t, kMaxKeyBytes> &padded() const { return data_; }
  std::string hex() const;

  bool operator==(const FlowKey &) const = default;

 private:
  std::array<uint8_t, kMaxKeyBytes> data_{};
  uint8_t len_{0};
  uint64_t signature_{0};
};

class ScopeSpec {
 public:
  // Throws Error{kInvalidScope} when empty or wider than kMaxKeyBytes.
  explicit ScopeSpec(std::vector<FieldId> fields);

  const std::vector<FieldId> &fields() const { return fields_; }
  std::size_t byte_width() const { return byte_width_; }
  uint64_t signature() const { return signature_; }
  std::string to_string() const;

  // Same per-field widths in the same order.
  bool compatible_with(const ScopeSpec &other) const {
    return signature_ == other.signature_;
  }

  // nullopt when any scope field is absent from the packet.
  std::optional<FlowKey> extract(const ParsedPacket &pkt) const;

  // Builds a key from explicit field values, in scope order.
  FlowKey make_key(std::span<const uint64_t> values) const;

  bool operator==(const ScopeSpec &other) const {
    return fields_ == other.fields_;
  }

 private:
  std::vector<FieldId> fields_;
  std::size_t byte_width_{0};
  uint64_t signature_{0};
};

uint64_t width_signature(std::span<const std::size_t> widths);

}  // namespace xfsm

#endif  // XFSM_SCOPE_H_
