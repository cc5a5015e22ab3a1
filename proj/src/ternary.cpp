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

#include "ternary.h"

namespace xfsm {

TernaryPattern::TernaryPattern(std::size_t width, std::vector<uint8_t> value,
                               std::vector<uint8_t> mask)
    : width_(width), value_(std::move(value)), mask_(std::move(mask)) {
  if (width_ == 0)
    throw Error(ErrorCode::kInvalidPattern, "pattern width must be > 0");
  std::size_t bytes = (width_ + 7) / 8;
  if (value_.size() != bytes || mask_.size() != bytes)
    throw Error(ErrorCode::kWidthMismatch,
                "pattern of width " + std::to_string(width_) + " needs " +
                    std::to_string(bytes) + "-byte value and mask");
  for (std::size_t i = 0; i < bytes; i++) {
    if (value_[i] & ~mask_[i])
      throw Error(ErrorCode::kInvalidPattern,
                  "value bit set under a zero mask bit at byte " +
                      std::to_string(i));
  }
  unsigned spare = static_cast<unsigned>(bytes * 8 - width_);
  if (spare) {
    auto tail = static_cast<uint8_t>((1u << spare) - 1);
    if (mask_.back() & tail)
      throw Error(ErrorCode::kInvalidPattern, "mask bits beyond width");
  }
}

TernaryPattern TernaryPattern::exact(std::size_t width,
                                     std::vector<uint8_t> value) {
  std::size_t bytes = (width + 7) / 8;
  std::vector<uint8_t> mask(bytes, 0xff);
  if (unsigned spare = static_cast<unsigned>(bytes * 8 - width); spare && bytes)
    mask.back() = static_cast<uint8_t>(0xff << spare);
  return TernaryPattern(width, std::move(value), std::move(mask));
}

TernaryPattern TernaryPattern::any(std::size_t width) {
  std::size_t bytes = (width + 7) / 8;
  return TernaryPattern(width, std::vector<uint8_t>(bytes, 0),
                        std::vector<uint8_t>(bytes, 0));
}

bool TernaryPattern::matches(std::span<const uint8_t> key) const {
  if (key.size() != value_.size()) return false;
  for (std::size_t i = 0; i < key.size(); i++)
    if ((key[i] & mask_[i]) != value_[i]) return false;
  return true;
}

}  // namespace xfsm
