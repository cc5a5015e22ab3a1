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

#ifndef XFSM_VALUES_H_
#define XFSM_VALUES_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "packet.h"

namespace xfsm {

// Text forms used by program files, traces and logs. All parsers throw
// Error{kInvalidArgument}.
uint64_t parse_mac(std::string_view s);
uint32_t parse_ipv4(std::string_view s);
uint64_t parse_uint(std::string_view s);  // decimal or 0x-prefixed hex
std::string format_mac(uint64_t mac);
std::string format_ipv4(uint32_t ip);

// MAC fields take aa:bb:cc:dd:ee:ff, IPv4 fields dotted quads, everything
// else an integer. Range-checked against the field width.
uint64_t parse_field_value(FieldId f, std::string_view s);
std::string format_field_value(FieldId f, uint64_t v);

struct ValueMask {
  uint64_t value;
  uint64_t mask;
};

// "v" or "v/m"; IPv4 fields also accept a prefix length ("10.0.0.0/8").
// Throws Error{kInvalidPattern} when v has bits outside m.
ValueMask parse_field_match(FieldId f, std::string_view s);

std::string to_hex(const std::vector<uint8_t> &bytes);
std::vector<uint8_t> from_hex(std::string_view hex);

}  // namespace xfsm

#endif  // XFSM_VALUES_H_
