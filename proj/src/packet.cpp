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

#include "packet.h"

#include <algorithm>
#include <string>

#include "error.h"

namespace xfsm {

namespace {

constexpr std::array<FieldInfo, kNumFields> kFields = {{
    {FieldId::kInPort, "in_port", 32, 0},
    {FieldId::kEthSrc, "eth_src", 48, 4},
    {FieldId::kEthDst, "eth_dst", 48, 3},
    {FieldId::kEthType, "eth_type", 16, 5},
    {FieldId::kMplsLabel, "mpls_label", 20, 34},
    {FieldId::kIpSrc, "ip_src", 32, 11},
    {FieldId::kIpDst, "ip_dst", 32, 12},
    {FieldId::kIpProto, "ip_proto", 8, 10},
    {FieldId::kIpDscp, "ip_dscp", 6, 8},
    {FieldId::kTcpSrc, "tcp_src", 16, 13},
    {FieldId::kTcpDst, "tcp_dst", 16, 14},
    {FieldId::kTcpFlags, "tcp_flags", 8, 42},
    {FieldId::kUdpSrc, "udp_src", 16, 15},
    {FieldId::kUdpDst, "udp_dst", 16, 16},
    {FieldId::kMetadata, "metadata", 64, 2},
}};

constexpr std::size_t kEthHeader = 14;
constexpr std::size_t kMplsShim = 4;
constexpr std::size_t kIpv4MinHeader = 20;
constexpr std::size_t kTcpMinHeader = 20;
constexpr std::size_t kUdpHeader = 8;

uint64_t read_be(const std::vector<uint8_t> &b, std::size_t off,
                 std::size_t n) {
  uint64_t v = 0;
  for (std::size_t i = 0; i < n; i++) v = (v << 8) | b[off + i];
  return v;
}

void write_be(std::vector<uint8_t> *b, std::size_t off, std::size_t n,
              uint64_t v) {
  for (std::size_t i = 0; i < n; i++) {
    (*b)[off + n - 1 - i] = static_cast<uint8_t>(v & 0xff);
    v >>= 8;
  }
}

uint16_t infer_inner_type(const std::vector<uint8_t> &b, std::size_t off) {
  if (off < b.size() && (b[off] >> 4) == 4) return ethertype::kIpv4;
  return ethertype::kArp;
}

[[noreturn]] void malformed(const std::string &layer) {
  throw Error(ErrorCode::kMalformedHeader,
              layer + " header exceeds frame length");
}

}  // namespace

const FieldInfo &field_info(FieldId f) { return kFields[field_index(f)]; }

std::span<const FieldInfo> all_fields() { return kFields; }

std::optional<FieldId> field_from_name(std::string_view name) {
  for (const auto &fi : kFields)
    if (fi.name == name) return fi.id;
  return std::nullopt;
}

std::optional<FieldId> field_from_oxm(uint16_t oxm_field) {
  for (const auto &fi : kFields)
    if (fi.oxm_field == oxm_field) return fi.id;
  return std::nullopt;
}

uint16_t internet_checksum(std::span<const uint8_t> data) {
  uint32_t sum = 0;
  std::size_t i = 0;
  for (; i + 1 < data.size(); i += 2)
    sum += static_cast<uint32_t>(data[i] << 8 | data[i + 1]);
  if (i < data.size()) sum += static_cast<uint32_t>(data[i] << 8);
  while (sum >> 16) sum = (sum & 0xffff) + (sum >> 16);
  return static_cast<uint16_t>(~sum & 0xffff);
}

ParsedPacket ParsedPacket::parse(std::vector<uint8_t> bytes,
                                 uint32_t in_port) {
  if (bytes.size() < kMinFrame)
    throw Error(ErrorCode::kFrameTooShort,
                "frame of " + std::to_string(bytes.size()) +
                    " bytes is shorter than an Ethernet header");
  ParsedPacket pkt;
  pkt.bytes_ = std::move(bytes);
  pkt.in_port_ = in_port;
  pkt.reparse();
  if (pkt.mpls_offset_)
    pkt.inner_eth_type_ = infer_inner_type(pkt.bytes_, *pkt.mpls_offset_ + 4);
  return pkt;
}

void ParsedPacket::reparse() {
  fields_.fill(std::nullopt);
  mpls_offset_.reset();
  l3_offset_.reset();
  l4_offset_.reset();
  const auto &b = bytes_;

  fields_[field_index(FieldId::kInPort)] = in_port_;
  fields_[field_index(FieldId::kMetadata)] = metadata_;
  fields_[field_index(FieldId::kEthDst)] = read_be(b, 0, 6);
  fields_[field_index(FieldId::kEthSrc)] = read_be(b, 6, 6);
  auto eth_type = static_cast<uint16_t>(read_be(b, 12, 2));
  fields_[field_index(FieldId::kEthType)] = eth_type;

  std::size_t off = kEthHeader;
  bool ipv4 = eth_type == ethertype::kIpv4;
  if (eth_type == ethertype::kMpls || eth_type == ethertype::kMplsMulticast) {
    if (b.size() < off + kMplsShim) malformed("MPLS");
    mpls_offset_ = off;
    fields_[field_index(FieldId::kMplsLabel)] = read_be(b, off, 4) >> 12;
    off += kMplsShim;
    ipv4 = off < b.size() && (b[off] >> 4) == 4;
  }
  if (!ipv4) return;

  if (b.size() < off + kIpv4MinHeader) malformed("IPv4");
  if ((b[off] >> 4) != 4) malformed("IPv4");
  std::size_t ihl = static_cast<std::size_t>(b[off] & 0x0f) * 4;
  if (ihl < kIpv4MinHeader || b.size() < off + ihl) malformed("IPv4");
  l3_offset_ = off;
  fields_[field_index(FieldId::kIpDscp)] = b[off + 1] >> 2;
  uint8_t proto = b[off + 9];
  fields_[field_index(FieldId::kIpProto)] = proto;
  fields_[field_index(FieldId::kIpSrc)] = read_be(b, off + 12, 4);
  fields_[field_index(FieldId::kIpDst)] = read_be(b, off + 16, 4);
  bool first_fragment = (read_be(b, off + 6, 2) & 0x1fff) == 0;
  if (!first_fragment) return;
  off += ihl;

  if (proto == ipproto::kTcp) {
    if (b.size() < off + kTcpMinHeader) malformed("TCP");
    std::size_t doff = static_cast<std::size_t>(b[off + 12] >> 4) * 4;
    if (doff < kTcpMinHeader || b.size() < off + doff) malformed("TCP");
    l4_offset_ = off;
    fields_[field_index(FieldId::kTcpSrc)] = read_be(b, off, 2);
    fields_[field_index(FieldId::kTcpDst)] = read_be(b, off + 2, 2);
    fields_[field_index(FieldId::kTcpFlags)] = b[off + 13];
  } else if (proto == ipproto::kUdp) {
    if (b.size() < off + kUdpHeader) malformed("UDP");
    l4_offset_ = off;
    fields_[field_index(FieldId::kUdpSrc)] = read_be(b, off, 2);
    fields_[field_index(FieldId::kUdpDst)] = read_be(b, off + 2, 2);
  }
}

void ParsedPacket::refresh_ipv4_checksum() {
  std::size_t off = *l3_offset_;
  std::size_t ihl = static_cast<std::size_t>(bytes_[off] & 0x0f) * 4;
  bytes_[off + 10] = 0;
  bytes_[off + 11] = 0;
  uint16_t sum = internet_checksum(
      std::span<const uint8_t>(bytes_.data() + off, ihl));
  write_be(&bytes_, off + 10, 2, sum);
}

void ParsedPacket::set(FieldId f, uint64_t value) {
  const auto &fi = field_info(f);
  if (value > field_max(f))
    throw Error(ErrorCode::kValueOverflow,
                std::to_string(value) + " does not fit " +
                    std::to_string(fi.bits) + "-bit field " +
                    std::string(fi.name));
  if (f == FieldId::kMetadata) {
    metadata_ = value;
    fields_[field_index(f)] = value;
    return;
  }
  if (!has(f))
    throw Error(ErrorCode::kFieldAbsent,
                std::string(fi.name) + " is not present in the packet");
  std::vector<uint8_t> saved;
  bool relayers = f == FieldId::kEthType || f == FieldId::kIpProto;
  if (relayers) saved = bytes_;
  switch (f) {
    case FieldId::kInPort:
      in_port_ = static_cast<uint32_t>(value);
      break;
    case FieldId::kEthDst:
      write_be(&bytes_, 0, 6, value);
      break;
    case FieldId::kEthSrc:
      write_be(&bytes_, 6, 6, value);
      break;
    case FieldId::kMplsLabel: {
      auto shim = read_be(bytes_, *mpls_offset_, 4);
      shim = (shim & 0xfff) | (value << 12);
      write_be(&bytes_, *mpls_offset_, 4, shim);
      break;
    }
    case FieldId::kIpDscp: {
      auto &tos = bytes_[*l3_offset_ + 1];
      tos = static_cast<uint8_t>((value << 2) | (tos & 0x3));
      refresh_ipv4_checksum();
      break;
    }
    case FieldId::kIpProto:
      bytes_[*l3_offset_ + 9] = static_cast<uint8_t>(value);
      refresh_ipv4_checksum();
      break;
    case FieldId::kIpSrc:
      write_be(&bytes_, *l3_offset_ + 12, 4, value);
      refresh_ipv4_checksum();
      break;
    case FieldId::kIpDst:
      write_be(&bytes_, *l3_offset_ + 16, 4, value);
      refresh_ipv4_checksum();
      break;
    case FieldId::kTcpSrc:
    case FieldId::kUdpSrc:
      write_be(&bytes_, *l4_offset_, 2, value);
      break;
    case FieldId::kTcpDst:
    case FieldId::kUdpDst:
      write_be(&bytes_, *l4_offset_ + 2, 2, value);
      break;
    case FieldId::kTcpFlags:
      bytes_[*l4_offset_ + 13] = static_cast<uint8_t>(value);
      break;
    case FieldId::kEthType:
    case FieldId::kMetadata:
      break;
  }
  if (relayers) {
    // These select the following layer, so the field map is rebuilt.
    if (f == FieldId::kEthType) write_be(&bytes_, 12, 2, value);
    try {
      reparse();
    } catch (const Error &) {
      bytes_ = std::move(saved);
      reparse();
      throw;
    }
    return;
  }
  fields_[field_index(f)] = value;
}

void ParsedPacket::push_label(uint32_t label) {
  if (label > field_max(FieldId::kMplsLabel))
    throw Error(ErrorCode::kValueOverflow,
                "MPLS label " + std::to_string(label) + " exceeds 20 bits");
  if (mpls_offset_)
    throw Error(ErrorCode::kInvalidArgument,
                "packet already carries an MPLS label");
  auto prior = static_cast<uint16_t>(read_be(bytes_, 12, 2));
  // label | TC=0 | bottom-of-stack | TTL=64
  uint32_t shim = (label << 12) | (1u << 8) | 64u;
  std::array<uint8_t, kMplsShim> raw{};
  for (std::size_t i = 0; i < kMplsShim; i++)
    raw[i] = static_cast<uint8_t>(shim >> (8 * (3 - i)));
  bytes_.insert(bytes_.begin() + kEthHeader, raw.begin(), raw.end());
  write_be(&bytes_, 12, 2, ethertype::kMpls);
  reparse();
  inner_eth_type_ = prior;
}

void ParsedPacket::pop_label() {
  if (!mpls_offset_)
    throw Error(ErrorCode::kNoLabel, "packet carries no MPLS label");
  auto off = static_cast<std::ptrdiff_t>(*mpls_offset_);
  bytes_.erase(bytes_.begin() + off, bytes_.begin() + off + kMplsShim);
  write_be(&bytes_, 12, 2, inner_eth_type_);
  reparse();
}

std::vector<uint8_t> build_frame(const FrameSpec &spec) {
  std::vector<uint8_t> b(kEthHeader, 0);
  write_be(&b, 0, 6, spec.eth_dst);
  write_be(&b, 6, 6, spec.eth_src);
  uint16_t inner_type = spec.ipv4 ? ethertype::kIpv4 : ethertype::kArp;
  uint16_t eth_type = spec.mpls_label ? ethertype::kMpls : inner_type;
  write_be(&b, 12, 2, spec.eth_type.value_or(eth_type));

  if (spec.mpls_label) {
    uint32_t shim = (*spec.mpls_label << 12) | (1u << 8) | 64u;
    b.resize(b.size() + kMplsShim);
    write_be(&b, b.size() - kMplsShim, 4, shim);
  }

  if (!spec.ipv4) {
    // Minimal ARP request body (RFC 826) for Ethernet/IPv4.
    std::size_t off = b.size();
    b.resize(off + 28, 0);
    write_be(&b, off, 2, 1);
    write_be(&b, off + 2, 2, ethertype::kIpv4);
    b[off + 4] = 6;
    b[off + 5] = 4;
    write_be(&b, off + 6, 2, 1);
    write_be(&b, off + 8, 6, spec.eth_src);
    b.resize(b.size() + spec.payload_len, 0);
    return b;
  }

  const auto &ip = *spec.ipv4;
  uint8_t proto = ip.proto.value_or(spec.tcp   ? ipproto::kTcp
                                    : spec.udp ? ipproto::kUdp
                                               : 0xfd);
  std::size_t l4_len = spec.tcp ? kTcpMinHeader : spec.udp ? kUdpHeader : 0;
  std::size_t ip_off = b.size();
  std::size_t total = kIpv4MinHeader + l4_len + spec.payload_len;
  b.resize(ip_off + total, 0);
  b[ip_off] = 0x45;
  b[ip_off + 1] = static_cast<uint8_t>(ip.dscp << 2);
  write_be(&b, ip_off + 2, 2, total);
  b[ip_off + 8] = ip.ttl;
  b[ip_off + 9] = proto;
  write_be(&b, ip_off + 12, 4, ip.src);
  write_be(&b, ip_off + 16, 4, ip.dst);
  write_be(&b, ip_off + 10, 2,
           internet_checksum(std::span<const uint8_t>(b.data() + ip_off,
                                                      kIpv4MinHeader)));

  std::size_t l4 = ip_off + kIpv4MinHeader;
  if (spec.tcp) {
    write_be(&b, l4, 2, spec.tcp->src);
    write_be(&b, l4 + 2, 2, spec.tcp->dst);
    b[l4 + 12] = 5 << 4;
    b[l4 + 13] = spec.tcp->flags;
    write_be(&b, l4 + 14, 2, 0xffff);
  } else if (spec.udp) {
    write_be(&b, l4, 2, spec.udp->src);
    write_be(&b, l4 + 2, 2, spec.udp->dst);
    write_be(&b, l4 + 4, 2, kUdpHeader + spec.payload_len);
  }
  if (spec.tcp || spec.udp) {
    // Pseudo-header checksum; UDP may legally carry zero but TCP may not.
    std::vector<uint8_t> pseudo(12 + l4_len + spec.payload_len, 0);
    std::copy(b.begin() + static_cast<std::ptrdiff_t>(ip_off + 12),
              b.begin() + static_cast<std::ptrdiff_t>(ip_off + 20),
              pseudo.begin());
    pseudo[9] = proto;
    write_be(&pseudo, 10, 2, l4_len + spec.payload_len);
    std::copy(b.begin() + static_cast<std::ptrdiff_t>(l4), b.end(),
              pseudo.begin() + 12);
    std::size_t csum_off = spec.tcp ? l4 + 16 : l4 + 6;
    uint16_t sum = internet_checksum(pseudo);
    if (spec.udp && sum == 0) sum = 0xffff;
    write_be(&b, csum_off, 2, sum);
  }
  return b;
}

}  // namespace xfsm
