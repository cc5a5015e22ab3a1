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

#ifndef XFSM_WIRE_H_
#define XFSM_WIRE_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <variant>
#include <vector>

namespace xfsm {
namespace wire {

// Byte layouts are documented in docs/wire.md. All integers are big-endian.

inline constexpr uint8_t kVersion = 0x04;  // OpenFlow 1.3 framing

enum MessageType : uint8_t {
  kFeaturesRequest = 5,
  kFeaturesReply = 6,
  kFlowMod = 14,
  kTableMod = 17,
  kStateMod = 30,
};

inline constexpr std::size_t kHeaderLen = 8;
inline constexpr std::size_t kStateModFixedLen = kHeaderLen + 18;
inline constexpr std::size_t kStateModCommandOffset = kHeaderLen + 17;
inline constexpr std::size_t kMaxKeyLen = 48;  // OFPSC_MAX_KEY_LEN
inline constexpr std::size_t kStateEntryLen = 4 + 4 + kMaxKeyLen + 4 + 4;
inline constexpr std::size_t kFlowModFixedLen = kHeaderLen + 40;

enum class StateModCommand : uint8_t {
  kSetLookupExtractor = 0,  // OFPSC_SET_L_EXTRACTOR
  kSetUpdateExtractor = 1,  // OFPSC_SET_U_EXTRACTOR
  kAddFlowState = 2,        // OFPSC_ADD_FLOW_STATE
  kDelFlowState = 3,        // OFPSC_DEL_FLOW_STATE
};

// capability / table-config bits
inline constexpr uint32_t kCapTableStateful = 1u << 4;     // OFPC_TABLE_STATEFULL
inline constexpr uint32_t kTableConfigStateful = 1u << 4;  // OFPCT_TABLE_STATEFULL

inline constexpr uint16_t kOxmClassBasic = 0x8000;
inline constexpr uint16_t kOxmClassState = 0x8001;
inline constexpr uint8_t kOxmStateLabel = 0;  // 4 bytes, maskable
inline constexpr uint8_t kOxmStateNull = 1;   // 1 byte, value 1

inline constexpr uint16_t kInstrGotoTable = 1;
inline constexpr uint16_t kInstrApplyActions = 4;
inline constexpr uint16_t kInstrClearActions = 5;
inline constexpr uint16_t kInstrMeter = 6;
inline constexpr uint16_t kInstrSetState = 7;  // OFPIT_SET_STATE
inline constexpr uint16_t kSetStateLen = 16;

inline constexpr uint16_t kActionOutput = 0;
inline constexpr uint16_t kActionPushMpls = 19;
inline constexpr uint16_t kActionPopMpls = 20;
inline constexpr uint16_t kActionSetField = 25;

inline constexpr uint32_t kPortFlood = 0xfffffffb;  // OFPP_FLOOD
inline constexpr uint32_t kPortState = 0xfffffff7;  // output to state label
inline constexpr uint32_t kPortAny = 0xffffffff;

enum FlowModCommand : uint8_t {
  kFlowAdd = 0,
  kFlowDelete = 3,
  kFlowDeleteStrict = 4,
};

struct Extractor {
  std::vector<uint16_t> fields;  // OXM field numbers, in scope order
  bool operator==(const Extractor &) const = default;
};

struct StateEntryWire {
  std::vector<uint8_t> key;  // key_len bytes, <= kMaxKeyLen
  uint32_t state{0};
  uint32_t timeout{0};  // microseconds
  uint32_t to_state{0};
  bool operator==(const StateEntryWire &) const = default;
};

struct StateMod {
  uint64_t cookie{0};       // reserved, carried unchanged
  uint64_t cookie_mask{0};  // reserved, carried unchanged
  uint8_t table_id{0};
  StateModCommand command{StateModCommand::kSetLookupExtractor};
  std::variant<Extractor, StateEntryWire> payload;
  bool operator==(const StateMod &) const = default;
};

struct SetStateInstruction {
  uint32_t state{0};
  uint32_t timeout{0};
  uint32_t to_state{0};
  bool operator==(const SetStateInstruction &) const = default;
};

struct OxmField {
  uint16_t oxm_class{kOxmClassBasic};
  uint8_t field{0};
  std::vector<uint8_t> value;
  std::vector<uint8_t> mask;  // empty when unmasked
  bool operator==(const OxmField &) const = default;
};

struct OutputAction {
  uint32_t port{0};
  uint16_t max_len{0};
  bool operator==(const OutputAction &) const = default;
};
struct PushMplsAction {
  uint16_t ethertype{0x8847};
  bool operator==(const PushMplsAction &) const = default;
};
struct PopMplsAction {
  uint16_t ethertype{0x0800};
  bool operator==(const PopMplsAction &) const = default;
};
struct SetFieldAction {
  OxmField field;
  bool operator==(const SetFieldAction &) const = default;
};
using WireAction =
    std::variant<OutputAction, PushMplsAction, PopMplsAction, SetFieldAction>;

struct GotoTableInstruction {
  uint8_t table_id{0};
  bool operator==(const GotoTableInstruction &) const = default;
};
struct ApplyActionsInstruction {
  std::vector<WireAction> actions;
  bool operator==(const ApplyActionsInstruction &) const = default;
};
struct ClearActionsInstruction {
  bool operator==(const ClearActionsInstruction &) const = default;
};
struct MeterInstruction {
  uint32_t meter_id{0};
  bool operator==(const MeterInstruction &) const = default;
};
using WireInstruction =
    std::variant<GotoTableInstruction, ApplyActionsInstruction,
                 ClearActionsInstruction, MeterInstruction,
                 SetStateInstruction>;

struct FlowMod {
  uint64_t cookie{0};
  uint64_t cookie_mask{0};
  uint8_t table_id{0};
  uint8_t command{kFlowAdd};
  uint16_t idle_timeout{0};
  uint16_t hard_timeout{0};
  uint16_t priority{0};
  uint32_t buffer_id{0xffffffff};
  uint32_t out_port{kPortAny};
  uint32_t out_group{kPortAny};
  uint16_t flags{0};
  std::vector<OxmField> match;
  std::vector<WireInstruction> instructions;
  bool operator==(const FlowMod &) const = default;
};

struct TableMod {
  uint8_t table_id{0};
  uint32_t config{0};
  bool operator==(const TableMod &) const = default;
};

struct FeaturesRequest {
  bool operator==(const FeaturesRequest &) const = default;
};

struct FeaturesReply {
  uint64_t datapath_id{0};
  uint32_t n_buffers{0};
  uint8_t n_tables{0};
  uint8_t auxiliary_id{0};
  uint32_t capabilities{0};
  bool operator==(const FeaturesReply &) const = default;
};

using Body = std::variant<StateMod, FlowMod, TableMod, FeaturesRequest,
                          FeaturesReply>;

struct Message {
  uint32_t xid{0};
  Body body;
  bool operator==(const Message &) const = default;
};

// Value length of a basic-class or state-class OXM field, 0 if unknown.
std::size_t oxm_value_len(uint16_t oxm_class, uint8_t field);

// Throws Error{kInvalidArgument} when the message violates its invariants.
std::vector<uint8_t> encode(const Message &msg);

// Decodes exactly one message occupying the whole buffer. Throws
// Error{kTruncated}, Error{kBadLength}, Error{kBadCommand},
// Error{kBadMessage} or Error{kUnknownAction}.
Message decode(std::span<const uint8_t> bytes);

// Splits a byte stream of back-to-back messages using the header length.
std::vector<Message> decode_stream(std::span<const uint8_t> bytes);

std::vector<uint8_t> encode_set_state(const SetStateInstruction &instr);
SetStateInstruction decode_set_state(std::span<const uint8_t> bytes);

}  // namespace wire
}  // namespace xfsm

#endif  // XFSM_WIRE_H_
