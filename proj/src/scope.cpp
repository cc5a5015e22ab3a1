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

#include "scope.h"

#include <algorithm>

#include "error.h"

namespace xfsm {

FlowKey::FlowKey(uint64_t signature, std::span<const uint8_t> bytes)
    : signature_(signature) {
  if (bytes.size() > kMaxKeyBytes)
    throw Error(ErrorCode::kInvalidArgument,
                "flow key of " + std::to_string(bytes.size()) +
                    " bytes exceeds " + std::to_string(kMaxKeyBytes));
  std::copy(bytes.begin(), bytes.end(), data_.begin());
  len_ = static_cast<uint8_t>(bytes.size());
}

std::string FlowKey::hex() const {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len_);
  for (std::size_t i = 0; i < len_; i++) {
    out.push_back(kDigits[data_[i] >> 4]);
    out.push_back(kDigits[data_[i] & 0xf]);
  }
  return out;
}

uint64_t width_signature(std::span<const std::size_t> widths) {
  // FNV-1a over the width list.
  uint64_t h = 0xcbf29ce484222325ull;
  auto mix = [&h](uint64_t v) {
    h ^= v;
    h *= 0x100000001b3ull;
  };
  mix(widths.size());
  for (auto w : widths) mix(w);
  return h;
}

ScopeSpec::ScopeSpec(std::vector<FieldId> fields) : fields_(std::move(fields)) {
  if (fields_.empty())
    throw Error(ErrorCode::kInvalidScope, "scope needs at least one field");
  std::vector<std::size_t> widths;
  for (auto f : fields_) {
    widths.push_back(field_bytes(f));
    byte_width_ += field_bytes(f);
  }
  if (byte_width_ > kMaxKeyBytes)
    throw Error(ErrorCode::kInvalidScope,
                "scope " + to_string() + " is " + std::to_string(byte_width_) +
                    " bytes wide, limit is " + std::to_string(kMaxKeyBytes));
  signature_ = width_signature(widths);
}

std::string ScopeSpec::to_string() const {
  std::string out;
  for (auto f : fields_) {
    if (!out.empty()) out += ",";
    out += field_info(f).name;
  }
  return out;
}

std::optional<FlowKey> ScopeSpec::extract(const ParsedPacket &pkt) const {
  std::array<uint64_t, kNumFields * 4> values{};
  std::size_t n = 0;
  for (auto f : fields_) {
    auto v = pkt.get(f);
    if (!v) return std::nullopt;
    values[n++] = *v;
  }
  return make_key(std::span<const uint64_t>(values.data(), n));
}

FlowKey ScopeSpec::make_key(std::span<const uint64_t> values) const {
  if (values.size() != fields_.size())
    throw Error(ErrorCode::kInvalidArgument,
                "scope " + to_string() + " takes " +
                    std::to_string(fields_.size()) + " values");
  std::array<uint8_t, kMaxKeyBytes> buf{};
  std::size_t off = 0;
  for (std::size_t i = 0; i < fields_.size(); i++) {
    auto n = field_bytes(fields_[i]);
    uint64_t v = values[i];
    for (std::size_t j = 0; j < n; j++) {
      buf[off + n - 1 - j] = static_cast<uint8_t>(v & 0xff);
      v >>= 8;
    }
    off += n;
  }
  return FlowKey(signature_, std::span<const uint8_t>(buf.data(), off));
}

}  // namespace xfsm
