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

#include "wire.h"

#include <string>

#include "error.h"
#include "packet.h"

namespace xfsm {
namespace wire {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

class Writer {
 public:
  void u8(uint8_t v) { buf_.push_back(v); }
  void u16(uint16_t v) { put(v, 2); }
  void u32(uint32_t v) { put(v, 4); }
  void u64(uint64_t v) { put(v, 8); }
  void bytes(std::span<const uint8_t> b) {
    buf_.insert(buf_.end(), b.begin(), b.end());
  }
  void zeros(std::size_t n) { buf_.insert(buf_.end(), n, 0); }
  void pad_to(std::size_t start, std::size_t align) {
    while ((buf_.size() - start) % align) buf_.push_back(0);
  }
  void patch16(std::size_t off, uint16_t v) {
    buf_[off] = static_cast<uint8_t>(v >> 8);
    buf_[off + 1] = static_cast<uint8_t>(v);
  }
  std::size_t size() const { return buf_.size(); }
  std::vector<uint8_t> take() { return std::move(buf_); }

 private:
  void put(uint64_t v, std::size_t n) {
    for (std::size_t i = 0; i < n; i++)
      buf_.push_back(static_cast<uint8_t>(v >> (8 * (n - 1 - i))));
  }
  std::vector<uint8_t> buf_;
};

class Reader {
 public:
  explicit Reader(std::span<const uint8_t> b) : b_(b) { }

  uint8_t u8() { return static_cast<uint8_t>(get(1)); }
  uint16_t u16() { return static_cast<uint16_t>(get(2)); }
  uint32_t u32() { return static_cast<uint32_t>(get(4)); }
  uint64_t u64() { return get(8); }
  std::vector<uint8_t> bytes(std::size_t n) {
    need(n);
    std::vector<uint8_t> out(b_.begin() + static_cast<std::ptrdiff_t>(pos_),
                             b_.begin() + static_cast<std::ptrdiff_t>(pos_ + n));
    pos_ += n;
    return out;
  }
  void skip(std::size_t n) {
    need(n);
    pos_ += n;
  }
  Reader sub(std::size_t n) {
    need(n);
    Reader r(b_.subspan(pos_, n));
    pos_ += n;
    return r;
  }
  std::size_t remaining() const { return b_.size() - pos_; }
  bool done() const { return pos_ == b_.size(); }

 private:
  void need(std::size_t n) const {
    if (b_.size() - pos_ < n)
      throw Error(ErrorCode::kTruncated,
                  "need " + std::to_string(n) + " bytes, " +
                      std::to_string(b_.size() - pos_) + " left");
  }
  uint64_t get(std::size_t n) {
    need(n);
    uint64_t v = 0;
    for (std::size_t i = 0; i < n; i++) v = (v << 8) | b_[pos_ + i];
    pos_ += n;
    return v;
  }
  std::span<const uint8_t> b_;
  std::size_t pos_{0};
};

[[noreturn]] void bad_length(const std::string &what) {
  throw Error(ErrorCode::kBadLength, what);
}

[[noreturn]] void invalid(const std::string &what) {
  throw Error(ErrorCode::kInvalidArgument, what);
}

void expect_exact(const Reader &r, std::size_t n, const std::string &what) {
  if (r.remaining() < n)
    throw Error(ErrorCode::kTruncated, what + " truncated");
  if (r.remaining() > n) bad_length(what + " has trailing bytes");
}

bool is_extractor(StateModCommand c) {
  return c == StateModCommand::kSetLookupExtractor ||
         c == StateModCommand::kSetUpdateExtractor;
}

// --- encode ---

void put_oxm(Writer *w, const OxmField &f) {
  if (f.field > 0x7f) invalid("OXM field number exceeds 7 bits");
  if (!f.mask.empty() && f.mask.size() != f.value.size())
    invalid("OXM mask length differs from value length");
  if (auto n = oxm_value_len(f.oxm_class, f.field); n && n != f.value.size())
    invalid("OXM value length " + std::to_string(f.value.size()) +
            " != " + std::to_string(n));
  std::size_t len = f.value.size() * (f.mask.empty() ? 1 : 2);
  if (len > 0xff) invalid("OXM payload too long");
  w->u16(f.oxm_class);
  w->u8(static_cast<uint8_t>(f.field << 1 | (f.mask.empty() ? 0 : 1)));
  w->u8(static_cast<uint8_t>(len));
  w->bytes(f.value);
  w->bytes(f.mask);
}

void put_action(Writer *w, const WireAction &a) {
  std::visit(Overloaded{
                 [&](const OutputAction &o) {
                   w->u16(kActionOutput);
                   w->u16(16);
                   w->u32(o.port);
                   w->u16(o.max_len);
                   w->zeros(6);
                 },
                 [&](const PushMplsAction &p) {
                   w->u16(kActionPushMpls);
                   w->u16(8);
                   w->u16(p.ethertype);
                   w->zeros(2);
                 },
                 [&](const PopMplsAction &p) {
                   w->u16(kActionPopMpls);
                   w->u16(8);
                   w->u16(p.ethertype);
                   w->zeros(2);
                 },
                 [&](const SetFieldAction &s) {
                   if (!s.field.mask.empty())
                     invalid("set_field cannot carry a mask");
                   std::size_t start = w->size();
                   w->u16(kActionSetField);
                   w->u16(0);
                   put_oxm(w, s.field);
                   w->pad_to(start, 8);
                   w->patch16(start + 2,
                              static_cast<uint16_t>(w->size() - start));
                 },
             },
             a);
}

void put_instruction(Writer *w, const WireInstruction &i) {
  std::visit(Overloaded{
                 [&](const GotoTableInstruction &g) {
                   w->u16(kInstrGotoTable);
                   w->u16(8);
                   w->u8(g.table_id);
                   w->zeros(3);
                 },
                 [&](const ApplyActionsInstruction &a) {
                   std::size_t start = w->size();
                   w->u16(kInstrApplyActions);
                   w->u16(0);
                   w->zeros(4);
                   for (const auto &act : a.actions) put_action(w, act);
                   auto len = w->size() - start;
                   if (len > 0xffff) invalid("action list too long");
                   w->patch16(start + 2, static_cast<uint16_t>(len));
                 },
                 [&](const ClearActionsInstruction &) {
                   w->u16(kInstrClearActions);
                   w->u16(8);
                   w->zeros(4);
                 },
                 [&](const MeterInstruction &m) {
                   w->u16(kInstrMeter);
                   w->u16(8);
                   w->u32(m.meter_id);
                 },
                 [&](const SetStateInstruction &s) {
                   w->u16(kInstrSetState);
                   w->u16(kSetStateLen);
                   w->u32(s.state);
                   w->u32(s.timeout);
                   w->u32(s.to_state);
                 },
             },
             i);
}

void put_state_entry(Writer *w, const StateEntryWire &e) {
  if (e.key.size() > kMaxKeyLen)
    invalid("state key of " + std::to_string(e.key.size()) +
            " bytes exceeds " + std::to_string(kMaxKeyLen));
  w->u32(static_cast<uint32_t>(e.key.size()));
  w->u32(e.state);
  w->bytes(e.key);
  w->zeros(kMaxKeyLen - e.key.size());
  w->u32(e.timeout);
  w->u32(e.to_state);
}

void put_body(Writer *w, const Body &body) {
  std::visit(
      Overloaded{
          [&](const StateMod &m) {
            w->u64(m.cookie);
            w->u64(m.cookie_mask);
            w->u8(m.table_id);
            w->u8(static_cast<uint8_t>(m.command));
            if (static_cast<uint8_t>(m.command) > 3)
              invalid("state-mod command out of range");
            if (is_extractor(m.command)) {
              const auto *x = std::get_if<Extractor>(&m.payload);
              if (!x) invalid("extractor command needs a field list");
              w->u32(static_cast<uint32_t>(x->fields.size()));
              for (auto f : x->fields) w->u16(f);
            } else {
              const auto *e = std::get_if<StateEntryWire>(&m.payload);
              if (!e) invalid("flow-state command needs a state entry");
              put_state_entry(w, *e);
            }
          },
          [&](const FlowMod &f) {
            w->u64(f.cookie);
            w->u64(f.cookie_mask);
            w->u8(f.table_id);
            w->u8(f.command);
            w->u16(f.idle_timeout);
            w->u16(f.hard_timeout);
            w->u16(f.priority);
            w->u32(f.buffer_id);
            w->u32(f.out_port);
            w->u32(f.out_group);
            w->u16(f.flags);
            w->zeros(2);
            std::size_t start = w->size();
            w->u16(1);  // OFPMT_OXM
            w->u16(0);
            for (const auto &oxm : f.match) put_oxm(w, oxm);
            w->patch16(start + 2, static_cast<uint16_t>(w->size() - start));
            w->pad_to(start, 8);
            for (const auto &i : f.instructions) put_instruction(w, i);
          },
          [&](const TableMod &t) {
            w->u8(t.table_id);
            w->zeros(3);
            w->u32(t.config);
          },
          [&](const FeaturesRequest &) {},
          [&](const FeaturesReply &r) {
            w->u64(r.datapath_id);
            w->u32(r.n_buffers);
            w->u8(r.n_tables);
            w->u8(r.auxiliary_id);
            w->zeros(2);
            w->u32(r.capabilities);
            w->u32(0);
          },
      },
      body);
}

uint8_t type_of(const Body &body) {
  return std::visit(Overloaded{
                        [](const StateMod &) { return uint8_t{kStateMod}; },
                        [](const FlowMod &) { return uint8_t{kFlowMod}; },
                        [](const TableMod &) { return uint8_t{kTableMod}; },
                        [](const FeaturesRequest &) {
                          return uint8_t{kFeaturesRequest};
                        },
                        [](const FeaturesReply &) {
                          return uint8_t{kFeaturesReply};
                        },
                    },
                    body);
}

// --- decode ---

OxmField get_oxm(Reader *r) {
  OxmField f;
  f.oxm_class = r->u16();
  uint8_t fh = r->u8();
  uint8_t len = r->u8();
  f.field = fh >> 1;
  bool has_mask = fh & 1;
  if (has_mask && len % 2) bad_length("odd masked OXM length");
  std::size_t vlen = has_mask ? len / 2 : len;
  if (auto n = oxm_value_len(f.oxm_class, f.field); n && n != vlen)
    bad_length("OXM field " + std::to_string(f.field) + " length " +
               std::to_string(vlen) + " != " + std::to_string(n));
  f.value = r->bytes(vlen);
  if (has_mask) f.mask = r->bytes(vlen);
  return f;
}

WireAction get_action(Reader *r) {
  uint16_t type = r->u16();
  uint16_t len = r->u16();
  if (len < 8 || len % 8) bad_length("action length " + std::to_string(len));
  Reader body = r->sub(len - 4u);
  switch (type) {
    case kActionOutput: {
      expect_exact(body, 12, "output action");
      OutputAction o;
      o.port = body.u32();
      o.max_len = body.u16();
      body.skip(6);
      return o;
    }
    case kActionPushMpls: {
      expect_exact(body, 4, "push_mpls action");
      PushMplsAction p{body.u16()};
      body.skip(2);
      return p;
    }
    case kActionPopMpls: {
      expect_exact(body, 4, "pop_mpls action");
      PopMplsAction p{body.u16()};
      body.skip(2);
      return p;
    }
    case kActionSetField: {
      SetFieldAction s{get_oxm(&body)};
      if (!s.field.mask.empty())
        throw Error(ErrorCode::kBadMessage, "set_field cannot carry a mask");
      if (body.remaining() >= 8) bad_length("set_field over-padded");
      return s;
    }
    default:
      throw Error(ErrorCode::kUnknownAction,
                  "unknown action type " + std::to_string(type));
  }
}

WireInstruction get_instruction(Reader *r) {
  uint16_t type = r->u16();
  uint16_t len = r->u16();
  if (type == kInstrSetState && len != kSetStateLen)
    bad_length("set-state instruction length " + std::to_string(len) +
               " != 16");
  if (len < 8 || len % 8)
    bad_length("instruction length " + std::to_string(len));
  Reader body = r->sub(len - 4u);
  switch (type) {
    case kInstrGotoTable: {
      GotoTableInstruction g{body.u8()};
      body.skip(3);
      return g;
    }
    case kInstrApplyActions: {
      body.skip(4);
      ApplyActionsInstruction a;
      while (!body.done()) a.actions.push_back(get_action(&body));
      return a;
    }
    case kInstrClearActions:
      body.skip(4);
      return ClearActionsInstruction{};
    case kInstrMeter:
      return MeterInstruction{body.u32()};
    case kInstrSetState: {
      SetStateInstruction s;
      s.state = body.u32();
      s.timeout = body.u32();
      s.to_state = body.u32();
      return s;
    }
    default:
      throw Error(ErrorCode::kBadMessage,
                  "unknown instruction type " + std::to_string(type));
  }
}

StateMod get_state_mod(Reader *r) {
  StateMod m;
  m.cookie = r->u64();
  m.cookie_mask = r->u64();
  m.table_id = r->u8();
  uint8_t cmd = r->u8();
  if (cmd > 3)
    throw Error(ErrorCode::kBadCommand,
                "state-mod command " + std::to_string(cmd));
  m.command = static_cast<StateModCommand>(cmd);
  if (is_extractor(m.command)) {
    Extractor x;
    uint32_t count = r->u32();
    if (static_cast<uint64_t>(count) * 2 != r->remaining()) {
      if (static_cast<uint64_t>(count) * 2 > r->remaining())
        throw Error(ErrorCode::kTruncated, "extractor field list truncated");
      bad_length("extractor field list has trailing bytes");
    }
    for (uint32_t i = 0; i < count; i++) x.fields.push_back(r->u16());
    m.payload = std::move(x);
  } else {
    expect_exact(*r, kStateEntryLen, "state entry");
    StateEntryWire e;
    uint32_t key_len = r->u32();
    if (key_len > kMaxKeyLen)
      bad_length("key_len " + std::to_string(key_len) + " exceeds " +
                 std::to_string(kMaxKeyLen));
    e.state = r->u32();
    auto key = r->bytes(kMaxKeyLen);
    e.key.assign(key.begin(), key.begin() + key_len);
    e.timeout = r->u32();
    e.to_state = r->u32();
    m.payload = std::move(e);
  }
  return m;
}

FlowMod get_flow_mod(Reader *r) {
  FlowMod f;
  f.cookie = r->u64();
  f.cookie_mask = r->u64();
  f.table_id = r->u8();
  f.command = r->u8();
  f.idle_timeout = r->u16();
  f.hard_timeout = r->u16();
  f.priority = r->u16();
  f.buffer_id = r->u32();
  f.out_port = r->u32();
  f.out_group = r->u32();
  f.flags = r->u16();
  r->skip(2);
  uint16_t match_type = r->u16();
  uint16_t match_len = r->u16();
  if (match_type != 1)
    throw Error(ErrorCode::kBadMessage,
                "match type " + std::to_string(match_type));
  if (match_len < 4) bad_length("match length below 4");
  Reader oxms = r->sub(match_len - 4u);
  while (!oxms.done()) f.match.push_back(get_oxm(&oxms));
  std::size_t padded = (match_len + 7u) / 8 * 8;
  r->skip(padded - match_len);
  while (!r->done()) f.instructions.push_back(get_instruction(r));
  return f;
}

}  // namespace

std::size_t oxm_value_len(uint16_t oxm_class, uint8_t field) {
  if (oxm_class == kOxmClassState) {
    if (field == kOxmStateLabel) return 4;
    if (field == kOxmStateNull) return 1;
    return 0;
  }
  if (oxm_class != kOxmClassBasic) return 0;
  auto id = field_from_oxm(field);
  if (!id) return 0;
  switch (*id) {
    case FieldId::kMplsLabel:
      return 4;
    case FieldId::kTcpFlags:
      return 2;
    default:
      return field_bytes(*id);
  }
}

std::vector<uint8_t> encode(const Message &msg) {
  Writer w;
  w.u8(kVersion);
  w.u8(type_of(msg.body));
  w.u16(0);
  w.u32(msg.xid);
  put_body(&w, msg.body);
  if (w.size() > 0xffff) invalid("message exceeds 65535 bytes");
  w.patch16(2, static_cast<uint16_t>(w.size()));
  return w.take();
}

Message decode(std::span<const uint8_t> bytes) {
  Reader hdr(bytes);
  uint8_t version = hdr.u8();
  uint8_t type = hdr.u8();
  uint16_t length = hdr.u16();
  uint32_t xid = hdr.u32();
  if (version != kVersion)
    throw Error(ErrorCode::kBadMessage,
                "unsupported version " + std::to_string(version));
  if (length < kHeaderLen) bad_length("header length below 8");
  if (length > bytes.size())
    throw Error(ErrorCode::kTruncated,
                "header declares " + std::to_string(length) + " bytes, got " +
                    std::to_string(bytes.size()));
  if (length < bytes.size())
    bad_length("header declares " + std::to_string(length) + " bytes, got " +
               std::to_string(bytes.size()));
  Reader r(bytes.subspan(kHeaderLen));
  Message msg;
  msg.xid = xid;
  switch (type) {
    case kStateMod:
      msg.body = get_state_mod(&r);
      break;
    case kFlowMod:
      msg.body = get_flow_mod(&r);
      break;
    case kTableMod: {
      expect_exact(r, 8, "table-mod");
      TableMod t;
      t.table_id = r.u8();
      r.skip(3);
      t.config = r.u32();
      msg.body = t;
      break;
    }
    case kFeaturesRequest:
      expect_exact(r, 0, "features request");
      msg.body = FeaturesRequest{};
      break;
    case kFeaturesReply: {
      expect_exact(r, 24, "features reply");
      FeaturesReply f;
      f.datapath_id = r.u64();
      f.n_buffers = r.u32();
      f.n_tables = r.u8();
      f.auxiliary_id = r.u8();
      r.skip(2);
      f.capabilities = r.u32();
      r.skip(4);
      msg.body = f;
      break;
    }
    default:
      throw Error(ErrorCode::kBadMessage,
                  "unsupported message type " + std::to_string(type));
  }
  if (!r.done()) bad_length("message has trailing bytes");
  return msg;
}

std::vector<Message> decode_stream(std::span<const uint8_t> bytes) {
  std::vector<Message> out;
  std::size_t pos = 0;
  while (pos < bytes.size()) {
    if (bytes.size() - pos < kHeaderLen)
      throw Error(ErrorCode::kTruncated, "partial header at end of stream");
    std::size_t len = static_cast<std::size_t>(bytes[pos + 2]) << 8 |
                      bytes[pos + 3];
    if (len < kHeaderLen) bad_length("header length below 8");
    if (bytes.size() - pos < len)
      throw Error(ErrorCode::kTruncated, "partial message at end of stream");
    out.push_back(decode(bytes.subspan(pos, len)));
    pos += len;
  }
  return out;
}

std::vector<uint8_t> encode_set_state(const SetStateInstruction &instr) {
  Writer w;
  put_instruction(&w, instr);
  return w.take();
}

SetStateInstruction decode_set_state(std::span<const uint8_t> bytes) {
  Reader r(bytes);
  uint16_t type = r.u16();
  uint16_t len = r.u16();
  if (type != kInstrSetState)
    throw Error(ErrorCode::kBadMessage,
                "instruction type " + std::to_string(type) + " is not set-state");
  if (len != kSetStateLen)
    bad_length("set-state instruction length " + std::to_string(len) +
               " != 16");
  expect_exact(r, kSetStateLen - 4, "set-state instruction");
  SetStateInstruction s;
  s.state = r.u32();
  s.timeout = r.u32();
  s.to_state = r.u32();
  return s;
}

}  // namespace wire
}  // namespace xfsm
