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

#ifndef XFSM_PACKET_H_
#define XFSM_PACKET_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace xfsm {

// Closed catalog of matchable / extractable fields. Order is the index into
// ParsedPacket's field array and into the XFSM key layout.
enum class FieldId : uint8_t {
  kInPort,
  kEthSrc,
  kEthDst,
  kEthType,
  kMplsLabel,
  kIpSrc,
  kIpDst,
  kIpProto,
  kIpDscp,
  kTcpSrc,
  kTcpDst,
  kTcpFlags,
  kUdpSrc,
  kUdpDst,
  kMetadata,
};

inline constexpr std::size_t kNumFields = 15;

struct FieldInfo {
  FieldId id;
  std::string_view name;  // lower-case program-file spelling
  unsigned bits;
  uint16_t oxm_field;     // OpenFlow OXM basic-class field number
};

const FieldInfo &field_info(FieldId f);
inline unsigned field_bits(FieldId f) { return field_info(f).bits; }
inline std::size_t field_bytes(FieldId f) { return (field_bits(f) + 7) / 8; }
inline std::size_t field_index(FieldId f) { return static_cast<std::size_t>(f); }
std::span<const FieldInfo> all_fields();
std::optional<FieldId> field_from_name(std::string_view name);
std::optional<FieldId> field_from_oxm(uint16_t oxm_field);
inline uint64_t field_max(FieldId f) {
  auto b = field_bits(f);
  return b >= 64 ? ~uint64_t{0} : (uint64_t{1} << b) - 1;
}

namespace ethertype {
inline constexpr uint16_t kIpv4 = 0x0800;
inline constexpr uint16_t kArp = 0x0806;
inline constexpr uint16_t kMpls = 0x8847;
inline constexpr uint16_t kMplsMulticast = 0x8848;
}  // namespace ethertype

namespace ipproto {
inline constexpr uint8_t kTcp = 6;
inline constexpr uint8_t kUdp = 17;
}  // namespace ipproto

namespace tcpflag {
inline constexpr uint8_t kFin = 0x01;
inline constexpr uint8_t kSyn = 0x02;
inline constexpr uint8_t kRst = 0x04;
inline constexpr uint8_t kPsh = 0x08;
inline constexpr uint8_t kAck = 0x10;
}  // namespace tcpflag

// RFC 1071 ones-complement sum over `data`, returned complemented.
uint16_t internet_checksum(std::span<const uint8_t> data);

// A frame plus the values of every field whose layer parsed. The raw bytes
// are kept in sync with every rewrite, so bytes() is the serialized packet.
class ParsedPacket {
 public:
  static constexpr std::size_t kMinFrame = 14;

  // Throws Error{kFrameTooShort} / Error{kMalformedHeader}.
  static ParsedPacket parse(std::vector<uint8_t> bytes, uint32_t in_port);

  std::optional<uint64_t> get(FieldId f) const {
    return fields_[field_index(f)];
  }
  bool has(FieldId f) const { return fields_[field_index(f)].has_value(); }

  // Throws Error{kFieldAbsent} / Error{kValueOverflow}.
  void set(FieldId f, uint64_t value);

  // Single label depth. push throws kInvalidArgument when already labeled,
  // pop throws kNoLabel on an unlabeled frame.
  void push_label(uint32_t label);
  void pop_label();

  const std::vector<uint8_t> &bytes() const { return bytes_; }
  uint32_t in_port() const { return in_port_; }
  uint64_t metadata() const { return metadata_; }

 private:
  ParsedPacket() = default;
  void reparse();
  void refresh_ipv4_checksum();

  std::vector<uint8_t> bytes_;
  uint32_t in_port_{0};
  uint64_t metadata_{0};
  std::array<std::optional<uint64_t>, kNumFields> fields_{};
  std::optional<std::size_t> mpls_offset_;
  std::optional<std::size_t> l3_offset_;
  std::optional<std::size_t> l4_offset_;
  // Ethertype the MPLS shim encapsulates; restored by pop_label().
  uint16_t inner_eth_type_{ethertype::kIpv4};
};

inline ParsedPacket parse(std::vector<uint8_t> bytes, uint32_t in_port) {
  return ParsedPacket::parse(std::move(bytes), in_port);
}

// Hand-assembled frames for traces and tests.
struct FrameSpec {
  uint64_t eth_dst{0xffffffffffff};
  uint64_t eth_src{0x000000000001};
  std::optional<uint16_t> eth_type;  // derived from the layers when unset
  std::optional<uint32_t> mpls_label;
  struct Ipv4 {
    uint32_t src{0};
    uint32_t dst{0};
    uint8_t dscp{0};
    uint8_t ttl{64};
    std::optional<uint8_t> proto;
  };
  std::optional<Ipv4> ipv4;
  struct Tcp {
    uint16_t src{0};
    uint16_t dst{0};
    uint8_t flags{tcpflag::kSyn};
  };
  std::optional<Tcp> tcp;
  struct Udp {
    uint16_t src{0};
    uint16_t dst{0};
  };
  std::optional<Udp> udp;
  std::size_t payload_len{0};
};

std::vector<uint8_t> build_frame(const FrameSpec &spec);

}  // namespace xfsm

#endif  // XFSM_PACKET_H_
