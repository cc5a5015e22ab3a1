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

#include "checks.h"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdarg>
#include <cstdio>
#include <map>
#include <set>
#include <chrono>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>

#include "control.h"
#include "error.h"
#include "hazard.h"
#include "oracles.h"
#include "program.h"
#include "programs.h"
#include "runner.h"
#include "state_table.h"
#include "switch.h"
#include "ternary.h"
#include "trace.h"
#include "wire.h"

#ifndef XFSM_SOURCE_DIR
#define XFSM_SOURCE_DIR "."
#endif

namespace checks {

using namespace xfsm;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char *f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char *f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  vsnprintf(buf, sizeof(buf), f, ap);
  va_end(ap);
  return buf;
}

std::string read_text(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<uint8_t> tcp_frame(uint32_t src, uint32_t dst, uint16_t dport) {
  FrameSpec spec;
  spec.ipv4 = FrameSpec::Ipv4{};
  spec.ipv4->src = src;
  spec.ipv4->dst = dst;
  spec.tcp = FrameSpec::Tcp{40000, dport, tcpflag::kSyn};
  return build_frame(spec);
}

bool forwarded_to(const Verdict &v, uint32_t port) {
  return !v.dropped && v.out_ports == std::vector<uint32_t>{port};
}

// Hex text with '#' comments.
std::vector<uint8_t> read_golden(const std::string &path) {
  std::istringstream in(read_text(path));
  std::string line, digits;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    for (char c : line)
      if (std::isxdigit(static_cast<unsigned char>(c))) digits.push_back(c);
  }
  std::vector<uint8_t> out;
  for (std::size_t i = 0; i + 1 < digits.size(); i += 2)
    out.push_back(static_cast<uint8_t>(std::stoul(digits.substr(i, 2), nullptr, 16)));
  return out;
}

uint64_t mac_from_text(const std::string &s) {
  std::string hex;
  for (char c : s)
    if (c != ':') hex.push_back(c);
  return std::stoull(hex, nullptr, 16);
}

}  // namespace

std::string source_path(const std::string &relative) {
  return std::string(XFSM_SOURCE_DIR) + "/" + relative;
}

// ---------------------------------------------------------------------------

Result knock_machine() {
  auto start = Clock::now();
  const uint32_t host = 0x01020304, server = 0x0a000001;
  auto def = programs::port_knocking();
  int pairs = 0, mismatches = 0;
  std::string first_bad;
  auto note = [&](uint32_t s, int sym, const char *how) {
    mismatches++;
    if (first_bad.empty())
      first_bad = fmt(" first mismatch: state %u symbol %u (%s)", s,
                      oracle::kSymbolPort[sym], how);
  };
  for (uint32_t s = 0; s <= 4; s++) {
    for (int sym = 0; sym < oracle::kNumSymbols; sym++) {
      pairs++;
      auto want = oracle::knock_step(s, sym);
      // Reach s through the knock sequence itself, then apply the symbol.
      auto sw = instantiate(def);
      auto &blk = sw->table(0);
      uint64_t vals[1] = {host};
      auto key = blk.lookup_scope()->make_key(vals);
      uint64_t now = 1;
      for (uint32_t i = 0; i < s; i++)
        sw->submit(tcp_frame(host, server, oracle::kSymbolPort[i]), 1, now++);
      if (blk.states().peek(key, now) != s) {
        note(s, sym, "prefix did not reach state");
        continue;
      }
      auto v = sw->submit(tcp_frame(host, server, oracle::kSymbolPort[sym]), 1,
                          now);
      bool fwd = forwarded_to(v, 2);
      if (fwd != want.forward || (!fwd && !v.dropped)) note(s, sym, "action");
      if (blk.states().peek(key, now) != want.next) note(s, sym, "next state");

      // Same pair with the state installed directly.
      auto sw2 = instantiate(def);
      sw2->table(0).states().set_state(key, s, 0, 0, 0);
      auto v2 = sw2->submit(tcp_frame(host, server, oracle::kSymbolPort[sym]),
                            1, 1);
      if (forwarded_to(v2, 2) != want.forward) note(s, sym, "preset action");
      if (sw2->table(0).states().peek(key, 1) != want.next)
        note(s, sym, "preset next state");
    }
  }

  // The bundled traces.
  auto sw = instantiate(load_program(source_path("programs/port_knocking.yaml")));
  auto trace = load_trace(source_path("traces/knock_ok.jsonl"));
  bool trace_ok = trace.size() == 5;
  for (std::size_t i = 0; i < trace.size(); i++) {
    auto v = sw->submit(trace[i].bytes, trace[i].port, trace[i].ts);
    bool last = i + 1 == trace.size();
    if (last ? !forwarded_to(v, 2) : !v.dropped) trace_ok = false;
  }
  auto dump = dump_state(*sw, trace.empty() ? 0 : trace.back().ts);
  trace_ok = trace_ok && dump.size() == 1 && dump[0]["state"] == 4 &&
             dump[0]["key_hex"] == "01020304";

  auto sw_bad =
      instantiate(load_program(source_path("programs/port_knocking.yaml")));
  std::ostringstream sink;
  auto summary = run_trace(sw_bad.get(), load_trace(source_path("traces/knock_bad.jsonl")),
                           &sink, OutputFormat::kJson);
  bool bad_ok = dump_state(*sw_bad, summary.last_ts).empty();

  double secs = seconds_since(start);
  Result r;
  r.pass = mismatches == 0 && trace_ok && bad_ok && secs < 1.0;
  r.detail = fmt("%d state/symbol pairs, %d mismatches; knock_ok trace %s; "
                 "knock_bad trace %s; %.3f s (limit 1 s)",
                 pairs, mismatches, trace_ok ? "ok" : "WRONG",
                 bad_ok ? "resets" : "WRONG", secs) +
             first_bad;
  return r;
}

// ---------------------------------------------------------------------------

namespace {

struct MacRun {
  uint64_t packets{0};
  uint64_t mismatches{0};
  uint64_t table_mismatches{0};
  std::size_t max_hosts{0};
};

void run_mac_trace(uint32_t ports, uint64_t seed, uint64_t packets,
                   Switch *full, Switch *param, MacRun *out) {
  TraceGenSpec spec;
  spec.kind = "mac";
  spec.seed = seed;
  spec.ports = ports;
  spec.hosts = 50;
  spec.packets = packets;
  auto text = gen_trace(spec);
  auto trace = parse_trace(text);
  oracle::LearningSwitch ref(ports);
  std::istringstream lines(text);
  std::string line;
  std::set<uint64_t> hosts;
  for (const auto &pkt : trace) {
    std::getline(lines, line);
    auto j = nlohmann::json::parse(line);
    uint64_t src = mac_from_text(j["eth_src"]);
    uint64_t dst = mac_from_text(j["eth_dst"]);
    hosts.insert(src);
    auto want = ref.process(src, dst, j["port"].get<uint32_t>());
    for (Switch *sw : {full, param}) {
      auto v = sw->submit(pkt.bytes, pkt.port, pkt.ts);
      if (v.out_ports != want || v.dropped != want.empty()) out->mismatches++;
    }
    out->packets++;
  }
  out->max_hosts = std::max(out->max_hosts, hosts.size());
  uint64_t now = trace.empty() ? 0 : trace.back().ts;
  for (Switch *sw : {full, param}) {
    auto &blk = sw->table(0);
    if (blk.states().size() != ref.table().size()) out->table_mismatches++;
    for (auto [mac, port] : ref.table()) {
      uint64_t vals[1] = {mac};
      if (blk.states().peek(blk.lookup_scope()->make_key(vals), now) != port)
        out->table_mismatches++;
    }
  }
}

}  // namespace

Result mac_learning(int traces, uint64_t packets) {
  auto start = Clock::now();
  auto full4 = programs::mac_learning(4);
  auto param4 = programs::mac_learning(4, true);
  auto full2 = programs::mac_learning(2);
  auto param2 = programs::mac_learning(2, true);
  std::size_t n_full = full4.tables[0].entries.size();
  std::size_t n_param = param4.tables[0].entries.size();
  bool sizes_ok = n_full == 20 && n_param == 5 &&
                  full2.tables[0].entries.size() == 6 &&
                  param2.tables[0].entries.size() == 3;
  MacRun run;
  for (int t = 0; t < traces; t++) {
    auto a = instantiate(full4);
    auto b = instantiate(param4);
    run_mac_trace(4, static_cast<uint64_t>(t + 1), packets, a.get(), b.get(), &run);
  }
  MacRun run2;
  for (int t = 0; t < 10; t++) {
    auto a = instantiate(full2);
    auto b = instantiate(param2);
    run_mac_trace(2, static_cast<uint64_t>(1000 + t), 2000, a.get(), b.get(), &run2);
  }
  double secs = seconds_since(start);
  Result r;
  r.pass = sizes_ok && run.mismatches == 0 && run.table_mismatches == 0 &&
           run2.mismatches == 0 && run2.table_mismatches == 0 &&
           run.max_hosts <= 50 && secs < 30.0;
  r.detail = fmt("N=4: %zu/%zu entries (full/parametric), %d traces x %llu "
                 "packets, %llu verdict mismatches, %llu state mismatches; "
                 "N=2: %llu mismatches; %.2f s (limit 30 s)",
                 n_full, n_param, traces,
                 static_cast<unsigned long long>(packets),
                 static_cast<unsigned long long>(run.mismatches),
                 static_cast<unsigned long long>(run.table_mismatches),
                 static_cast<unsigned long long>(run2.mismatches +
                                                 run2.table_mismatches),
                 secs);
  return r;
}

// ---------------------------------------------------------------------------

namespace {

// Alphabet of table writes for the precedence enumeration.
struct Op {
  enum Kind { kPermanent, kRollback, kRollbackDefault, kResetDefault, kException };
  Kind kind;
  uint8_t key{0};    // exact ops
  uint8_t value{0};  // exception ops
  uint8_t mask{0};
  uint32_t priority{0};
};

constexpr uint64_t kTimeout = 100;
constexpr uint64_t kProbeTimes[] = {0, 1, 99, 100, 101, 5000};

std::vector<Op> precedence_alphabet() {
  std::vector<Op> ops;
  for (uint8_t k = 0; k < 4; k++)
    for (auto kind : {Op::kPermanent, Op::kRollback, Op::kRollbackDefault,
                      Op::kResetDefault})
      ops.push_back(Op{kind, k, 0, 0, 0});
  const std::pair<uint8_t, uint8_t> patterns[] = {
      {0, 0}, {0, 2}, {2, 2}, {0, 3}, {1, 3}, {2, 3}, {3, 3}};
  for (auto [v, m] : patterns)
    for (uint32_t p : {0u, 1u}) ops.push_back(Op{Op::kException, 0, v, m, p});
  return ops;
}

StateLabel exact_state(const Op &op) { return 10 * (op.kind + 1) + op.key; }

StateLabel expected_state(const std::vector<const Op *> &seq, uint8_t key,
                          uint64_t t) {
  const Op *exact = nullptr;
  for (const Op *op : seq)
    if (op->kind != Op::kException && op->key == key) exact = op;
  if (exact) {
    switch (exact->kind) {
      case Op::kPermanent:
        return exact_state(*exact);
      case Op::kRollback:
        return t < kTimeout ? exact_state(*exact) : 90 + key;
      case Op::kRollbackDefault:
        if (t < kTimeout) return exact_state(*exact);
        break;
      default:
        break;
    }
  }
  const Op *best = nullptr;
  std::size_t best_i = 0;
  for (std::size_t i = 0; i < seq.size(); i++) {
    const Op *op = seq[i];
    if (op->kind != Op::kException || (key & op->mask) != op->value) continue;
    if (!best || op->priority > best->priority) {
      best = op;
      best_i = i;
    }
  }
  return best ? static_cast<StateLabel>(200 + best_i) : kDefaultState;
}

}  // namespace

Result state_precedence() {
  auto start = Clock::now();
  const ScopeSpec scope({FieldId::kIpProto});
  auto alphabet = precedence_alphabet();
  StateTableGeometry geo;
  geo.buckets = 4;
  geo.cells = 4;
  uint64_t tables = 0, probes = 0, mismatches = 0;
  std::string first_bad;
  std::vector<std::size_t> idx;
  std::function<void(std::size_t)> enumerate = [&](std::size_t depth) {
    if (idx.size() == depth) {
      tables++;
      std::vector<const Op *> seq;
      for (auto i : idx) seq.push_back(&alphabet[i]);
      StateTable st(geo);
      for (std::size_t i = 0; i < seq.size(); i++) {
        const Op &op = *seq[i];
        uint64_t v[1] = {op.key};
        auto key = scope.make_key(v);
        switch (op.kind) {
          case Op::kPermanent:
            st.set_state(key, exact_state(op), 0, 0, 0);
            break;
          case Op::kRollback:
            st.set_state(key, exact_state(op), kTimeout, 90 + op.key, 0);
            break;
          case Op::kRollbackDefault:
            st.set_state(key, exact_state(op), kTimeout, kDefaultState, 0);
            break;
          case Op::kResetDefault:
            st.set_state(key, kDefaultState, 0, kDefaultState, 0);
            break;
          case Op::kException: {
            std::vector<uint8_t> value(kMaxKeyBytes, 0), mask(kMaxKeyBytes, 0);
            value[0] = op.value;
            mask[0] = op.mask;
            st.add_exception(TernaryPattern(StateTable::kExceptionWidth,
                                            value, mask),
                             op.priority, static_cast<StateLabel>(200 + i));
            break;
          }
        }
      }
      // keys 4..7 are never written exactly and only see exceptions
      for (uint8_t k = 0; k < 8; k++) {
        uint64_t v[1] = {k};
        auto key = scope.make_key(v);
        for (uint64_t t : kProbeTimes) {
          probes++;
          auto want = expected_state(seq, k, t);
          auto peeked = st.peek(key, t);
          auto got = st.lookup(key, t);
          if (got != want || peeked != want) {
            if (first_bad.empty())
              first_bad = fmt(" first mismatch: table #%llu key %u t=%llu "
                              "got %u want %u",
                              static_cast<unsigned long long>(tables), k,
                              static_cast<unsigned long long>(t), got, want);
            mismatches++;
          }
        }
      }
      return;
    }
    for (std::size_t i = 0; i < alphabet.size(); i++) {
      idx.push_back(i);
      enumerate(depth);
      idx.pop_back();
    }
  };
  for (std::size_t depth = 0; depth <= 4; depth++) enumerate(depth);

  // Timeout boundary at microsecond granularity over random write times.
  std::mt19937_64 rng(42);
  uint64_t boundary_bad = 0;
  const ScopeSpec wide({FieldId::kIpSrc, FieldId::kIpDst});
  for (int i = 0; i < 10000; i++) {
    StateTable st(geo);
    uint64_t v[2] = {rng() & 0xffffffff, rng() & 0xffffffff};
    auto key = wide.make_key(v);
    uint64_t written = rng() % 1'000'000'000;
    uint64_t timeout = 1 + rng() % 10'000'000;
    st.set_state(key, 7, timeout, 8, written);
    if (st.lookup(key, written + timeout - 1) != 7) boundary_bad++;
    if (st.lookup(key, written + timeout) != 8) boundary_bad++;
    if (st.lookup(key, written + timeout + 1 + rng() % 1000) != 8) boundary_bad++;
  }

  double secs = seconds_since(start);
  Result r;
  r.pass = mismatches == 0 && boundary_bad == 0;
  r.detail = fmt("%llu tables (<= 4 entries over %zu-op alphabet, 4 written and 8 probed keys), "
                 "%llu probes, %llu mismatches; 10000 timeout boundaries, "
                 "%llu off-by-one; %.2f s",
                 static_cast<unsigned long long>(tables), alphabet.size(),
                 static_cast<unsigned long long>(probes),
                 static_cast<unsigned long long>(mismatches),
                 static_cast<unsigned long long>(boundary_bad), secs) +
             first_bad;
  return r;
}

// ---------------------------------------------------------------------------

Result tcam_oracle(int cases, uint64_t seed) {
  std::mt19937_64 rng(seed);
  uint64_t mismatches = 0, ties = 0, misses = 0;
  for (int c = 0; c < cases; c++) {
    std::size_t width = 1 + rng() % 72;
    std::size_t bytes = (width + 7) / 8;
    unsigned spare = static_cast<unsigned>(bytes * 8 - width);
    auto width_mask = [&](std::size_t b) -> uint8_t {
      return b + 1 == bytes ? static_cast<uint8_t>(0xff << spare) : 0xff;
    };
    std::size_t n = rng() % 65;
    TernaryTable<std::size_t> table(width, 64);
    std::vector<oracle::TcamRow> rows;
    std::vector<EntryHandle> handles;
    for (std::size_t i = 0; i < n; i++) {
      std::vector<uint8_t> value(bytes), mask(bytes);
      for (std::size_t b = 0; b < bytes; b++) {
        int style = static_cast<int>(rng() % 4);
        uint8_t m = style == 0 ? 0 : style == 1 ? 0xff : static_cast<uint8_t>(rng());
        mask[b] = m & width_mask(b);
        value[b] = static_cast<uint8_t>(rng()) & mask[b];
      }
      uint32_t prio = static_cast<uint32_t>(rng() % 4);
      handles.push_back(table.insert(TernaryPattern(width, value, mask), prio, i));
      rows.push_back({value, mask, prio, true});
    }
    for (std::size_t i = 0; i < n; i++) {
      if (rng() % 10 == 0) {
        table.remove(handles[i]);
        rows[i].live = false;
      }
    }
    std::vector<uint8_t> key(bytes);
    for (auto &b : key) b = static_cast<uint8_t>(rng());
    if (n && rng() % 4) {
      const auto &row = rows[rng() % n];
      for (std::size_t b = 0; b < bytes; b++)
        key[b] = static_cast<uint8_t>((row.value[b] & row.mask[b]) |
                                      (key[b] & ~row.mask[b]));
    }
    for (std::size_t b = 0; b < bytes; b++) key[b] &= width_mask(b);
    auto want = oracle::tcam_lookup(rows, key);
    const auto *got = table.lookup(key);
    if (!want) misses++;
    if (want) {
      for (std::size_t i = 0; i < n; i++)
        if (i != *want && rows[i].live && rows[i].priority == rows[*want].priority &&
            oracle::tcam_lookup(std::vector<oracle::TcamRow>{rows[i]}, key)) {
          ties++;
          break;
        }
    }
    if ((got == nullptr) != !want || (got && got->payload != *want)) mismatches++;
  }
  Result r;
  r.pass = mismatches == 0;
  r.detail = fmt("%d random tables (<= 64 entries, widths 1..72 bits), "
                 "%llu mismatches vs linear scan; %llu cases with "
                 "equal-priority ties, %llu misses",
                 cases, static_cast<unsigned long long>(mismatches),
                 static_cast<unsigned long long>(ties),
                 static_cast<unsigned long long>(misses));
  return r;
}

// ---------------------------------------------------------------------------

namespace {

class MessageGen {
 public:
  explicit MessageGen(uint64_t seed) : rng_(seed) { }

  wire::Message next() {
    wire::Message m;
    m.xid = u32();
    switch (rng_() % 6) {
      case 0:
      case 1:
        m.body = state_mod();
        break;
      case 2:
      case 3:
        m.body = flow_mod();
        break;
      case 4:
        m.body = wire::TableMod{u8(), u32()};
        break;
      default:
        if (rng_() % 2) {
          m.body = wire::FeaturesRequest{};
        } else {
          wire::FeaturesReply f;
          f.datapath_id = rng_();
          f.n_buffers = u32();
          f.n_tables = u8();
          f.auxiliary_id = u8();
          f.capabilities = u32();
          m.body = f;
        }
    }
    return m;
  }

 private:
  uint8_t u8() { return static_cast<uint8_t>(rng_()); }
  uint16_t u16() { return static_cast<uint16_t>(rng_()); }
  uint32_t u32() { return static_cast<uint32_t>(rng_()); }
  std::vector<uint8_t> random_bytes(std::size_t n) {
    std::vector<uint8_t> b(n);
    for (auto &x : b) x = u8();
    return b;
  }

  uint16_t field_code() {
    auto fields = all_fields();
    return fields[rng_() % fields.size()].oxm_field;
  }

  wire::StateMod state_mod() {
    wire::StateMod s;
    s.cookie = rng_();
    s.cookie_mask = rng_();
    s.table_id = u8();
    s.command = static_cast<wire::StateModCommand>(rng_() % 4);
    if (s.command == wire::StateModCommand::kSetLookupExtractor ||
        s.command == wire::StateModCommand::kSetUpdateExtractor) {
      wire::Extractor x;
      std::size_t n = 1 + rng_() % 6;
      for (std::size_t i = 0; i < n; i++) x.fields.push_back(field_code());
      s.payload = x;
    } else {
      wire::StateEntryWire e;
      e.key = random_bytes(rng_() % (wire::kMaxKeyLen + 1));
      e.state = u32();
      e.timeout = u32();
      e.to_state = u32();
      s.payload = e;
    }
    return s;
  }

  wire::OxmField oxm(bool allow_mask) {
    wire::OxmField f;
    int kind = static_cast<int>(rng_() % 8);
    if (kind == 0) {
      f.oxm_class = wire::kOxmClassState;
      f.field = wire::kOxmStateLabel;
    } else if (kind == 1) {
      f.oxm_class = wire::kOxmClassState;
      f.field = wire::kOxmStateNull;
      allow_mask = false;
    } else {
      f.field = static_cast<uint8_t>(field_code());
    }
    f.value = random_bytes(wire::oxm_value_len(f.oxm_class, f.field));
    if (kind == 1) f.value = {1};
    if (allow_mask && rng_() % 2) f.mask = random_bytes(f.value.size());
    return f;
  }

  wire::WireAction action() {
    switch (rng_() % 4) {
      case 0:
        return wire::OutputAction{u32(), u16()};
      case 1:
        return wire::PushMplsAction{u16()};
      case 2:
        return wire::PopMplsAction{u16()};
      default:
        return wire::SetFieldAction{oxm(false)};
    }
  }

  wire::WireInstruction instruction() {
    switch (rng_() % 5) {
      case 0:
        return wire::GotoTableInstruction{u8()};
      case 1: {
        wire::ApplyActionsInstruction a;
        std::size_t n = rng_() % 5;
        for (std::size_t i = 0; i < n; i++) a.actions.push_back(action());
        return a;
      }
      case 2:
        return wire::ClearActionsInstruction{};
      case 3:
        return wire::MeterInstruction{u32()};
      default:
        return wire::SetStateInstruction{u32(), u32(), u32()};
    }
  }

  wire::FlowMod flow_mod() {
    wire::FlowMod f;
    f.cookie = rng_();
    f.cookie_mask = rng_();
    f.table_id = u8();
    const uint8_t commands[] = {wire::kFlowAdd, wire::kFlowDelete,
                                wire::kFlowDeleteStrict};
    f.command = commands[rng_() % 3];
    f.idle_timeout = u16();
    f.hard_timeout = u16();
    f.priority = u16();
    f.buffer_id = u32();
    f.out_port = u32();
    f.out_group = u32();
    f.flags = u16();
    std::size_t n = rng_() % 6;
    for (std::size_t i = 0; i < n; i++) f.match.push_back(oxm(true));
    std::size_t k = rng_() % 5;
    for (std::size_t i = 0; i < k; i++) f.instructions.push_back(instruction());
    return f;
  }

  std::mt19937_64 rng_;
};

ErrorCode decode_error(std::span<const uint8_t> bytes) {
  try {
    wire::decode(bytes);
  } catch (const Error &e) {
    return e.code();
  }
  return ErrorCode{0};
}

}  // namespace

Result wire_codec(int messages, uint64_t seed) {
  MessageGen gen(seed);
  int round_trip_bad = 0;
  std::vector<wire::Message> all;
  std::vector<uint8_t> stream;
  for (int i = 0; i < messages; i++) {
    auto m = gen.next();
    auto bytes = wire::encode(m);
    bool ok = false;
    try {
      auto back = wire::decode(bytes);
      ok = back == m && wire::encode(back) == bytes;
    } catch (const Error &) {
    }
    if (!ok) round_trip_bad++;
    all.push_back(m);
    stream.insert(stream.end(), bytes.begin(), bytes.end());
  }
  bool stream_ok = wire::decode_stream(stream) == all;

  // Extractor messages of the learning switch, against hand-written bytes.
  int golden_bad = 0;
  struct Golden {
    const char *file;
    bool lookup;
    FieldId field;
    uint8_t command;
  };
  const Golden goldens[] = {
      {"tests/golden/set_l_extractor_eth_dst.hex", true, FieldId::kEthDst, 0},
      {"tests/golden/set_u_extractor_eth_src.hex", false, FieldId::kEthSrc, 1},
  };
  for (const auto &g : goldens) {
    auto want = read_golden(source_path(g.file));
    auto got = wire::encode(set_extractor(0, g.lookup, ScopeSpec({g.field})));
    if (got != want || want.size() <= wire::kStateModCommandOffset ||
        want[wire::kStateModCommandOffset] != g.command)
      golden_bad++;
    else if (wire::decode(want) != set_extractor(0, g.lookup, ScopeSpec({g.field})))
      golden_bad++;
  }

  // The set-state instruction is exactly 16 bytes long.
  int len_bad = 0;
  auto instr = wire::encode_set_state({5, 1000, 1});
  if (instr.size() != 16 || instr[2] != 0 || instr[3] != 16) len_bad++;
  for (uint8_t len : {0, 8, 12, 15, 17, 20, 24}) {
    auto b = instr;
    b[3] = len;
    try {
      wire::decode_set_state(b);
      len_bad++;
    } catch (const Error &e) {
      if (e.code() != ErrorCode::kBadLength) len_bad++;
    }
  }
  wire::FlowMod fm;
  fm.instructions = {wire::SetStateInstruction{5, 1000, 1}};
  auto fm_bytes = wire::encode(wire::Message{1, fm});
  // header, fixed body, empty match (8 bytes), then the instruction
  std::size_t len_at = wire::kFlowModFixedLen + 8 + 2;
  if (fm_bytes[len_at] != 0 || fm_bytes[len_at + 1] != 16) len_bad++;
  fm_bytes[len_at + 1] = 12;
  if (decode_error(fm_bytes) != ErrorCode::kBadLength) len_bad++;

  Result r;
  r.pass = round_trip_bad == 0 && stream_ok && golden_bad == 0 && len_bad == 0;
  r.detail = fmt("%d random messages, %d round-trip failures, stream split %s; "
                 "%d/2 extractor goldens byte-exact; set-state len=16 "
                 "enforcement %s",
                 messages, round_trip_bad, stream_ok ? "ok" : "WRONG",
                 2 - golden_bad, len_bad ? "BROKEN" : "ok");
  return r;
}

// ---------------------------------------------------------------------------

namespace {

std::size_t hazards_for(const std::vector<std::vector<Arrival>> &sched,
                        uint32_t latency, uint32_t ports, MixerMode mode) {
  HazardConfig cfg;
  cfg.latency = latency;
  cfg.num_ports = ports;
  cfg.schedules = sched;
  cfg.mode = mode;
  return simulate(cfg).hazards.size();
}

// One port sends a back-to-back same-flow burst, the others stay idle.
std::vector<std::vector<Arrival>> lone_burst(uint32_t port, uint32_t count) {
  std::vector<std::vector<Arrival>> s(port + 1);
  for (uint32_t i = 0; i < count; i++) s[port].push_back({i, "victim"});
  return s;
}

}  // namespace

Result hazard_model(int schedules) {
  bool five_ok = min_safe_ports(5) == 5 &&
                 min_safe_ports(5, MixerMode::kWorkConserving) == 5;

  // min_safe_ports(L) against a direct sweep of the strict mixer.
  int sweep_bad = 0, api_bad = 0;
  for (uint32_t L = 1; L <= 16; L++) {
    if (min_safe_ports(L) != L ||
        min_safe_ports(L, MixerMode::kWorkConserving) != L)
      api_bad++;
    uint32_t smallest = 0;
    for (uint32_t n = 1; n <= L + 2 && !smallest; n++) {
      bool any = false;
      for (uint32_t p = 0; p < n && !any; p++)
        any = hazards_for(lone_burst(p, 2 * L + 2), L, n, MixerMode::kStrict) > 0;
      if (!any) smallest = n;
    }
    if (smallest != L) sweep_bad++;
  }

  // Monotonicity in N: the default mixer on random sparse schedules, and the
  // strict mixer on backlogged schedules that start together.
  std::mt19937_64 rng(2024);
  int wc_bad = 0, strict_bad = 0, strict_decreasing = 0;
  for (int s = 0; s < schedules; s++) {
    uint32_t busy = 1 + static_cast<uint32_t>(rng() % 4);
    std::vector<std::vector<Arrival>> sparse(busy), backlog(busy);
    for (uint32_t p = 0; p < busy; p++) {
      uint64_t c = rng() % 4;
      std::size_t k = 1 + rng() % 20;
      for (std::size_t i = 0; i < k; i++) {
        sparse[p].push_back({c, "f" + std::to_string(rng() % 4)});
        c += 1 + rng() % 4;
      }
      std::size_t kb = 1 + rng() % 20;
      for (std::size_t i = 0; i < kb; i++)
        backlog[p].push_back({i, "f" + std::to_string(rng() % 4)});
    }
    std::size_t prev_wc = SIZE_MAX, prev_strict = SIZE_MAX, first_strict = 0;
    bool wc_mono = true, strict_mono = true;
    for (uint32_t n = busy; n <= 16; n++) {
      auto h = hazards_for(sparse, 5, n, MixerMode::kWorkConserving);
      if (h > prev_wc) wc_mono = false;
      prev_wc = h;
      auto hs = hazards_for(backlog, 5, n, MixerMode::kStrict);
      if (n == busy) first_strict = hs;
      if (hs > prev_strict) strict_mono = false;
      prev_strict = hs;
    }
    if (!wc_mono) wc_bad++;
    if (!strict_mono) strict_bad++;
    if (prev_strict < first_strict) strict_decreasing++;
  }

  // Worked cases.
  bool examples_ok =
      hazards_for({{{0, "a"}, {1, "a"}}}, 5, 1, MixerMode::kWorkConserving) == 1 &&
      hazards_for(lone_burst(0, 12), 5, 5, MixerMode::kStrict) == 0 &&
      hazards_for({{{0, "a"}}}, 5, 1, MixerMode::kWorkConserving) == 0;

  Result r;
  r.pass = five_ok && api_bad == 0 && sweep_bad == 0 && wc_bad == 0 &&
           strict_bad == 0 && examples_ok;
  r.detail = fmt("min_safe_ports(5)=%u; L in [1,16]: %d disagreements "
                 "(function), %d (direct sweep); monotone in N: "
                 "work-conserving %d/%d violations, strict backlogged %d/%d "
                 "violations (%d strictly decreasing); examples %s",
                 min_safe_ports(5), api_bad, sweep_bad, wc_bad, schedules,
                 strict_bad, schedules, strict_decreasing,
                 examples_ok ? "ok" : "WRONG");
  return r;
}

// ---------------------------------------------------------------------------

Result ddos_scenario() {
  namespace sc = xfsm::ddos_scenario;
  namespace dd = programs::ddos;
  programs::DdosConfig cfg;
  cfg.destinations = {sc::kVictim};
  auto sw = instantiate(programs::ddos_mitigation(cfg));
  TraceGenSpec spec;
  spec.kind = "ddos";
  auto trace = parse_trace(gen_trace(spec));
  std::map<uint32_t, int> sent, drops;
  std::map<uint32_t, int> late_drops;  // stage-2 flows after 4.9 s
  for (const auto &p : trace) {
    auto v = sw->submit(p.bytes, p.port, p.ts);
    auto pkt = ParsedPacket::parse(p.bytes, p.port);
    auto src = static_cast<uint32_t>(*pkt.get(FieldId::kIpSrc));
    sent[src]++;
    if (v.dropped) {
      drops[src]++;
      if (p.ts >= 4'900'000) late_drops[src]++;
    }
  }
  uint64_t end = trace.back().ts;
  auto state = [&](uint8_t table, uint32_t src) {
    auto &b = sw->table(table);
    uint64_t v[2] = {src, sc::kVictim};
    return b.states().peek(b.lookup_scope()->make_key(v), end);
  };
  std::vector<std::string> failures;
  auto expect = [&](bool ok, const std::string &what) {
    if (!ok) failures.push_back(what);
  };
  for (auto src : sc::kPreAttack) {
    expect(state(1, src) == dd::kGreen, "pre-attack GREEN");
    expect(drops[src] == 0 && sent[src] > 50, "pre-attack forwarded");
  }
  expect(state(1, sc::kHeavy) == dd::kGreen && drops[sc::kHeavy] == 0,
         "heavy hitter GREEN");
  for (auto src : sc::kStage1) {
    expect(state(1, src) == dd::kYellow, "stage-1 YELLOW");
    expect(drops[src] == 0, "stage-1 forwarded");
  }
  for (int i = 0; i < 4; i++) {
    auto src = sc::kStage2[i];
    bool returning = i < sc::kStage2Returning;
    expect(state(1, src) == dd::kYellow, "stage-2 YELLOW in table 1");
    // the first packet is forwarded as it enters table 3
    expect(drops[src] == sc::kStage2Packets - 1, "stage-2 drops");
    if (returning) {
      expect(state(3, src) == dd::kYellow, "RED rolled back to YELLOW");
      expect(late_drops[src] == 0 && sent[src] == sc::kStage2Packets + 3,
             "returning flow forwarded");
    } else {
      expect(state(3, src) == dd::kRed, "stage-2 RED");
    }
  }
  int total_drops = 0;
  for (auto [src, n] : drops) total_drops += n;
  expect(total_drops == 4 * (sc::kStage2Packets - 1), "no other drops");

  Result r;
  r.pass = failures.empty();
  r.detail = fmt("%zu packets, %d dropped; pre-attack GREEN, stage-1 YELLOW, "
                 "stage-2 RED (%d dropped each), returning flows YELLOW",
                 trace.size(), total_drops, sc::kStage2Packets - 1);
  if (!failures.empty()) {
    r.detail += "; failed:";
    for (const auto &f : failures) r.detail += " [" + f + "]";
  }
  return r;
}

// ---------------------------------------------------------------------------

namespace {

struct Probe {
  ParsedPacket pkt;
  StateLabel state;
};

double ns_per_match(const StatefulBlock &blk, const std::vector<Probe> &probes,
                    uint64_t lookups, uint64_t *sink) {
  auto start = Clock::now();
  for (uint64_t i = 0; i < lookups; i++) {
    const auto &p = probes[i % probes.size()];
    const auto *e = blk.match(State::of(p.state), p.pkt);
    *sink += reinterpret_cast<uintptr_t>(e) >> 4;
  }
  return seconds_since(start) * 1e9 / static_cast<double>(lookups);
}

std::vector<Probe> mac_probes(uint32_t ports, std::size_t n, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Probe> out;
  for (std::size_t i = 0; i < n; i++) {
    FrameSpec spec;
    spec.eth_src = 0x020000000000ull | (rng() % 50);
    spec.eth_dst = 0x020000000000ull | (rng() % 50);
    auto port = static_cast<uint32_t>(1 + rng() % ports);
    auto state = static_cast<StateLabel>(rng() % (ports + 1));
    out.push_back({ParsedPacket::parse(build_frame(spec), port), state});
  }
  return out;
}

}  // namespace

Result match_timing(uint64_t lookups) {
  auto full = instantiate(programs::mac_learning(50));
  auto param50 = instantiate(programs::mac_learning(50, true));
  auto param4 = instantiate(programs::mac_learning(4, true));
  auto &fb = full->table(0);
  auto &p50 = param50->table(0);
  auto &p4 = param4->table(0);
  auto probes50 = mac_probes(50, 4096, 9);
  auto probes4 = mac_probes(4, 4096, 9);
  uint64_t sink = 0;
  // warm-up, then measure
  ns_per_match(fb, probes50, lookups / 10, &sink);
  double t_full = ns_per_match(fb, probes50, lookups, &sink);
  double t_p4 = ns_per_match(p4, probes4, lookups, &sink);
  double t_p50 = ns_per_match(p50, probes50, lookups, &sink);
  double ratio = t_full / t_p4;
  double ratio50 = t_full / t_p50;
  Result r;
  r.pass = fb.entry_count() == 2550 && p4.entry_count() == 5 &&
           p50.entry_count() == 51 && ratio >= 5.0 && ratio50 >= 5.0 &&
           lookups >= 100000;
  r.detail = fmt("%llu lookups each: 2550-entry table %.1f ns/match, 5-entry "
                 "%.1f ns (ratio %.1fx), 51-entry %.1f ns (ratio %.1fx); "
                 "required >= 5x [sink %llu]",
                 static_cast<unsigned long long>(lookups), t_full, t_p4,
                 ratio, t_p50, ratio50,
                 static_cast<unsigned long long>(sink % 10));
  return r;
}

}  // namespace checks
