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

#include "trace.h"

#include <algorithm>
#include <fstream>
#include <nlohmann/json.hpp>
#include <random>
#include <sstream>

#include "error.h"
#include "packet.h"
#include "values.h"

namespace xfsm {

namespace {

using json = nlohmann::json;

[[noreturn]] void fail(std::size_t line, const std::string &key,
                       const std::string &msg) {
  throw Error(ErrorCode::kSchemaError, "line " + std::to_string(line) + ": " +
                                           key + ": " + msg);
}

uint64_t number(const json &v, std::size_t line, const std::string &key,
                uint64_t max) {
  uint64_t n = 0;
  if (v.is_number_unsigned()) {
    n = v.get<uint64_t>();
  } else if (v.is_number_integer()) {
    if (v.get<int64_t>() < 0) fail(line, key, "negative value");
    n = static_cast<uint64_t>(v.get<int64_t>());
  } else if (v.is_string()) {
    try {
      n = parse_uint(v.get<std::string>());
    } catch (const Error &e) {
      fail(line, key, e.what());
    }
  } else {
    fail(line, key, "expected an integer");
  }
  if (n > max) fail(line, key, "value above " + std::to_string(max));
  return n;
}

uint64_t field_value(const json &v, FieldId f, std::size_t line,
                     const std::string &key) {
  if (v.is_string()) {
    try {
      return parse_field_value(f, v.get<std::string>());
    } catch (const Error &e) {
      fail(line, key, e.what());
    }
  }
  return number(v, line, key, field_max(f));
}

TracePacket parse_line(const json &obj, std::size_t line, uint64_t prev_ts) {
  if (!obj.is_object()) fail(line, "$", "expected a JSON object");
  TracePacket pkt;
  pkt.ts = prev_ts;
  FrameSpec spec;
  bool have_hex = false, have_fields = false;
  FrameSpec::Ipv4 ip;
  bool have_ip = false;
  FrameSpec::Tcp tcp;
  bool have_tcp = false;
  FrameSpec::Udp udp;
  bool have_udp = false;
  for (const auto &[key, v] : obj.items()) {
    if (key == "port") {
      pkt.port = static_cast<uint32_t>(number(v, line, key, 0xffffffff));
    } else if (key == "ts") {
      pkt.ts = number(v, line, key, UINT64_MAX);
      if (pkt.ts < prev_ts) fail(line, key, "timestamp goes backwards");
    } else if (key == "hex") {
      if (!v.is_string()) fail(line, key, "expected a hex string");
      try {
        pkt.bytes = from_hex(v.get<std::string>());
      } catch (const Error &e) {
        fail(line, key, e.what());
      }
      have_hex = true;
    } else {
      have_fields = true;
      if (key == "eth_src") {
        spec.eth_src = field_value(v, FieldId::kEthSrc, line, key);
      } else if (key == "eth_dst") {
        spec.eth_dst = field_value(v, FieldId::kEthDst, line, key);
      } else if (key == "eth_type") {
        spec.eth_type = static_cast<uint16_t>(field_value(v, FieldId::kEthType, line, key));
      } else if (key == "mpls_label") {
        spec.mpls_label = static_cast<uint32_t>(field_value(v, FieldId::kMplsLabel, line, key));
      } else if (key == "ip_src") {
        ip.src = static_cast<uint32_t>(field_value(v, FieldId::kIpSrc, line, key));
        have_ip = true;
      } else if (key == "ip_dst") {
        ip.dst = static_cast<uint32_t>(field_value(v, FieldId::kIpDst, line, key));
        have_ip = true;
      } else if (key == "ip_proto") {
        ip.proto = static_cast<uint8_t>(field_value(v, FieldId::kIpProto, line, key));
        have_ip = true;
      } else if (key == "ip_dscp" || key == "dscp") {
        ip.dscp = static_cast<uint8_t>(field_value(v, FieldId::kIpDscp, line, key));
        have_ip = true;
      } else if (key == "ttl") {
        ip.ttl = static_cast<uint8_t>(number(v, line, key, 255));
        have_ip = true;
      } else if (key == "tcp_src") {
        tcp.src = static_cast<uint16_t>(field_value(v, FieldId::kTcpSrc, line, key));
        have_tcp = true;
      } else if (key == "tcp_dst") {
        tcp.dst = static_cast<uint16_t>(field_value(v, FieldId::kTcpDst, line, key));
        have_tcp = true;
      } else if (key == "tcp_flags") {
        tcp.flags = static_cast<uint8_t>(field_value(v, FieldId::kTcpFlags, line, key));
        have_tcp = true;
      } else if (key == "udp_src") {
        udp.src = static_cast<uint16_t>(field_value(v, FieldId::kUdpSrc, line, key));
        have_udp = true;
      } else if (key == "udp_dst") {
        udp.dst = static_cast<uint16_t>(field_value(v, FieldId::kUdpDst, line, key));
        have_udp = true;
      } else if (key == "payload_len") {
        spec.payload_len = number(v, line, key, 9000);
      } else {
        fail(line, key, "unknown key");
      }
    }
  }
  if (!obj.contains("port")) fail(line, "port", "missing");
  if (have_hex && have_fields)
    fail(line, "hex", "hex and shorthand fields are exclusive");
  if (have_tcp && have_udp) fail(line, "udp_src", "both TCP and UDP given");
  if (!have_hex) {
    if (have_tcp || have_udp) have_ip = true;
    if (have_ip) spec.ipv4 = ip;
    if (have_tcp) spec.tcp = tcp;
    if (have_udp) spec.udp = udp;
    pkt.bytes = build_frame(spec);
  }
  return pkt;
}

// Plain modulo keeps generated traces identical across standard libraries.
class Rng {
 public:
  explicit Rng(uint64_t seed) : gen_(seed) { }
  uint64_t below(uint64_t n) { return gen_() % n; }
  bool permille(uint32_t p) { return below(1000) < p; }

 private:
  std::mt19937_64 gen_;
};

std::string mac_str(uint32_t host) { return format_mac(0x020000000000ull | host); }

void gen_mac(const TraceGenSpec &spec, std::ostream &out) {
  if (spec.hosts < 2 || spec.ports < 1)
    throw Error(ErrorCode::kInvalidArgument, "mac traces need >= 2 hosts");
  Rng rng(spec.seed);
  std::vector<uint32_t> home(spec.hosts);
  for (auto &p : home) p = 1 + static_cast<uint32_t>(rng.below(spec.ports));
  for (uint64_t i = 0; i < spec.packets; i++) {
    auto src = static_cast<uint32_t>(rng.below(spec.hosts));
    if (rng.permille(spec.move_permille))
      home[src] = 1 + static_cast<uint32_t>(rng.below(spec.ports));
    json j;
    j["ts"] = i * spec.interval_us;
    j["port"] = home[src];
    j["eth_src"] = mac_str(src + 1);
    if (rng.permille(spec.broadcast_permille)) {
      j["eth_dst"] = format_mac(0xffffffffffffull);
    } else {
      auto dst = static_cast<uint32_t>(rng.below(spec.hosts - 1));
      if (dst >= src) dst++;
      j["eth_dst"] = mac_str(dst + 1);
    }
    out << j.dump() << "\n";
  }
}

void gen_knock(const TraceGenSpec &spec, std::ostream &out) {
  static const uint16_t kAlphabet[5] = {5123, 6234, 7345, 8456, 22};
  if (spec.hosts < 1)
    throw Error(ErrorCode::kInvalidArgument, "knock traces need hosts");
  Rng rng(spec.seed);
  std::vector<uint32_t> progress(spec.hosts, 0);
  for (uint64_t i = 0; i < spec.packets; i++) {
    auto h = static_cast<uint32_t>(rng.below(spec.hosts));
    uint16_t port;
    auto r = rng.below(10);
    if (r < 5) {
      port = kAlphabet[progress[h]];
      progress[h] = (progress[h] + 1) % 5;
    } else if (r < 8) {
      port = kAlphabet[rng.below(5)];
    } else {
      do {
        port = static_cast<uint16_t>(1024 + rng.below(60000));
      } while (std::find(std::begin(kAlphabet), std::end(kAlphabet), port) !=
               std::end(kAlphabet));
      progress[h] = 0;
    }
    json j;
    j["ts"] = i * spec.interval_us;
    j["port"] = 1;
    j["ip_src"] = format_ipv4(0x0a000100u + h + 1);
    j["ip_dst"] = "10.0.0.1";
    j["tcp_src"] = 40000 + h;
    j["tcp_dst"] = port;
    out << j.dump() << "\n";
  }
}

struct Timed {
  uint64_t ts;
  uint64_t order;
  json pkt;
};

void gen_ddos(std::ostream &out) {
  using namespace ddos_scenario;
  std::vector<Timed> pkts;
  uint64_t order = 0;
  auto syn = [&](uint64_t ts, uint32_t src, uint16_t sport) {
    json j;
    j["ts"] = ts;
    j["port"] = 1;
    j["ip_src"] = format_ipv4(src);
    j["ip_dst"] = format_ipv4(kVictim);
    j["tcp_src"] = sport;
    j["tcp_dst"] = 80;
    j["tcp_flags"] = tcpflag::kSyn;
    pkts.push_back({ts, order++, j});
  };
  const uint64_t ms = 1000;
  for (int i = 0; i < 3; i++)
    for (uint64_t t = 0; t < 5900 * ms; t += 100 * ms)
      syn(t + 1 + i, kPreAttack[i], static_cast<uint16_t>(1000 + i));
  auto heavy = [&](uint64_t from, uint64_t to) {
    for (uint64_t t = from; t < to; t += 3333) syn(t, kHeavy, 2000);
  };
  heavy(1000 * ms, 2700 * ms);
  heavy(4600 * ms, 5900 * ms);
  for (int i = 0; i < 4; i++) {
    for (uint64_t t = 1500 * ms; t < 2500 * ms; t += 200 * ms) {
      uint64_t ts = t + 500 + i * 50;
      syn(ts, kHeavy, 2000);
      syn(ts, kStage1[i], static_cast<uint16_t>(3000 + i));
    }
  }
  uint32_t spoof = 0xac100000;  // 172.16.0.0/12
  for (uint64_t t = 3000 * ms; t < 4000 * ms; t += 1250) syn(t, ++spoof, 4000);
  for (int i = 0; i < 4; i++) {
    for (int k = 0; k < kStage2Packets; k++) {
      uint64_t ts = 3200 * ms + k * 100 * ms + 600 + i * 50;
      syn(ts, ++spoof, 4000);
      syn(ts, ++spoof, 4000);
      syn(ts, kStage2[i], static_cast<uint16_t>(5000 + i));
    }
  }
  for (int i = 0; i < kStage2Returning; i++) {
    for (int k = 0; k < 3; k++) {
      uint64_t ts = 5000 * ms + k * 100 * ms + 700 + i * 50;
      syn(ts, kHeavy, 2000);
      syn(ts, kStage2[i], static_cast<uint16_t>(5000 + i));
    }
  }
  std::stable_sort(pkts.begin(), pkts.end(), [](const Timed &a, const Timed &b) {
    return a.ts < b.ts;
  });
  for (const auto &p : pkts) out << p.pkt.dump() << "\n";
}

}  // namespace

std::vector<TracePacket> parse_trace(const std::string &text) {
  std::vector<TracePacket> out;
  std::istringstream in(text);
  std::string line;
  std::size_t n = 0;
  uint64_t prev_ts = 0;
  while (std::getline(in, line)) {
    n++;
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error &e) {
      fail(n, "$", std::string("invalid JSON: ") + e.what());
    }
    out.push_back(parse_line(obj, n, prev_ts));
    prev_ts = out.back().ts;
  }
  return out;
}

std::vector<TracePacket> load_trace(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_trace(ss.str());
}

std::string gen_trace(const TraceGenSpec &spec) {
  std::ostringstream out;
  if (spec.kind == "mac")
    gen_mac(spec, out);
  else if (spec.kind == "knock")
    gen_knock(spec, out);
  else if (spec.kind == "ddos")
    gen_ddos(out);
  else
    throw Error(ErrorCode::kInvalidArgument,
                "unknown trace kind '" + spec.kind + "'");
  return out.str();
}

}  // namespace xfsm
