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

#include "values.h"

#include <arpa/inet.h>

#include <charconv>
#include <cstdio>

#include "error.h"

namespace xfsm {

namespace {

[[noreturn]] void bad(std::string_view what, std::string_view s) {
  throw Error(ErrorCode::kInvalidArgument,
              std::string(what) + " '" + std::string(s) + "'");
}

bool is_mac_field(FieldId f) {
  return f == FieldId::kEthSrc || f == FieldId::kEthDst;
}

bool is_ip_field(FieldId f) {
  return f == FieldId::kIpSrc || f == FieldId::kIpDst;
}

int hex_digit(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

uint64_t parse_mac(std::string_view s) {
  if (s.size() != 17) bad("bad MAC address", s);
  uint64_t v = 0;
  for (std::size_t i = 0; i < 6; i++) {
    int hi = hex_digit(s[i * 3]);
    int lo = hex_digit(s[i * 3 + 1]);
    if (hi < 0 || lo < 0 || (i < 5 && s[i * 3 + 2] != ':'))
      bad("bad MAC address", s);
    v = (v << 8) | static_cast<uint64_t>(hi << 4 | lo);
  }
  return v;
}

uint32_t parse_ipv4(std::string_view s) {
  std::string str(s);
  in_addr addr{};
  if (inet_pton(AF_INET, str.c_str(), &addr) != 1) bad("bad IPv4 address", s);
  return ntohl(addr.s_addr);
}

uint64_t parse_uint(std::string_view s) {
  int base = 10;
  std::string_view digits = s;
  if (s.size() > 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X')) {
    base = 16;
    digits = s.substr(2);
  }
  uint64_t v = 0;
  auto [ptr, ec] =
      std::from_chars(digits.data(), digits.data() + digits.size(), v, base);
  if (digits.empty() || ec != std::errc() ||
      ptr != digits.data() + digits.size())
    bad("bad integer", s);
  return v;
}

std::string format_mac(uint64_t mac) {
  char buf[18];
  std::snprintf(buf, sizeof buf, "%02x:%02x:%02x:%02x:%02x:%02x",
                static_cast<unsigned>(mac >> 40 & 0xff),
                static_cast<unsigned>(mac >> 32 & 0xff),
                static_cast<unsigned>(mac >> 24 & 0xff),
                static_cast<unsigned>(mac >> 16 & 0xff),
                static_cast<unsigned>(mac >> 8 & 0xff),
                static_cast<unsigned>(mac & 0xff));
  return buf;
}

std::string format_ipv4(uint32_t ip) {
  return std::to_string(ip >> 24) + "." + std::to_string(ip >> 16 & 0xff) +
         "." + std::to_string(ip >> 8 & 0xff) + "." + std::to_string(ip & 0xff);
}

uint64_t parse_field_value(FieldId f, std::string_view s) {
  uint64_t v;
  if (is_mac_field(f) && s.find(':') != std::string_view::npos)
    v = parse_mac(s);
  else if (is_ip_field(f) && s.find('.') != std::string_view::npos)
    v = parse_ipv4(s);
  else
    v = parse_uint(s);
  if (v > field_max(f))
    throw Error(ErrorCode::kValueOverflow,
                std::string(s) + " does not fit " +
                    std::string(field_info(f).name));
  return v;
}

std::string format_field_value(FieldId f, uint64_t v) {
  if (is_mac_field(f)) return format_mac(v);
  if (is_ip_field(f)) return format_ipv4(static_cast<uint32_t>(v));
  return std::to_string(v);
}

ValueMask parse_field_match(FieldId f, std::string_view s) {
  auto slash = s.find('/');
  if (slash == std::string_view::npos)
    return {parse_field_value(f, s), field_max(f)};
  auto vs = s.substr(0, slash);
  auto ms = s.substr(slash + 1);
  uint64_t value = parse_field_value(f, vs);
  uint64_t mask;
  if (is_ip_field(f) && ms.find('.') == std::string_view::npos) {
    uint64_t len = parse_uint(ms);
    if (len > 32) bad("bad prefix length", s);
    mask = len == 0 ? 0 : (0xffffffffull << (32 - len)) & 0xffffffffull;
  } else {
    mask = parse_field_value(f, ms);
  }
  if (value & ~mask)
    throw Error(ErrorCode::kInvalidPattern,
                "value has bits outside the mask in '" + std::string(s) + "'");
  return {value, mask};
}

std::string to_hex(const std::vector<uint8_t> &bytes) {
  static const char *digits = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (auto b : bytes) {
    out.push_back(digits[b >> 4]);
    out.push_back(digits[b & 0xf]);
  }
  return out;
}

std::vector<uint8_t> from_hex(std::string_view hex) {
  std::vector<uint8_t> out;
  int hi = -1;
  for (char c : hex) {
    if (c == ' ' || c == '\n' || c == '\t' || c == '\r' || c == ':') continue;
    int d = hex_digit(c);
    if (d < 0) bad("bad hex digit in", hex);
    if (hi < 0) {
      hi = d;
    } else {
      out.push_back(static_cast<uint8_t>(hi << 4 | d));
      hi = -1;
    }
  }
  if (hi >= 0) bad("odd number of hex digits in", hex);
  return out;
}

}  // namespace xfsm
