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

#ifndef XFSM_PROGRAM_H_
#define XFSM_PROGRAM_H_

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "meter.h"
#include "stateful_block.h"
#include "switch.h"

namespace xfsm {

struct MeterDef {
  uint32_t id{0};
  MeterUnit unit{MeterUnit::kPackets};
  std::vector<MeterBand> bands;
  bool operator==(const MeterDef &) const = default;
};

// Wildcard state entry over the lookup-scope fields.
struct ExceptionDef {
  std::vector<FieldMatch> match;
  uint32_t priority{0};
  StateLabel state{kDefaultState};
  bool operator==(const ExceptionDef &) const = default;
};

// Initial flow state; key values follow the lookup scope field order.
struct InitialState {
  std::vector<uint64_t> key;
  StateLabel state{kDefaultState};
  uint64_t timeout_us{0};
  StateLabel to_state{kDefaultState};
  bool operator==(const InitialState &) const = default;
};

struct TableDef {
  uint8_t id{0};
  bool stateful{false};
  std::optional<std::vector<FieldId>> lookup_scope;
  std::optional<std::vector<FieldId>> update_scope;
  std::size_t xfsm_capacity{128};
  std::optional<std::size_t> state_buckets;
  std::optional<std::size_t> state_cells;
  std::vector<XfsmEntry> entries;
  std::vector<ExceptionDef> exceptions;
  std::vector<InitialState> states;
  bool operator==(const TableDef &) const = default;
};

struct ProgramDef {
  uint32_t ports{0};
  std::map<std::string, StateLabel> state_names;
  std::vector<MeterDef> meters;
  std::vector<TableDef> tables;
  bool operator==(const ProgramDef &) const = default;
};

// YAML (or JSON, a YAML subset) program text. Throws Error{kSchemaError}
// whose message starts with "line N: path:".
ProgramDef parse_program(const std::string &text);
ProgramDef load_program(const std::string &path);
std::string write_program(const ProgramDef &def);

// Builds and activates a switch. Throws configuration errors from the
// datapath (UnknownMeter, NoDefaultEntry, ...).
std::unique_ptr<Switch> instantiate(const ProgramDef &def);

// Pattern over the zero-padded state-table key for a wildcard entry.
TernaryPattern exception_pattern(const ScopeSpec &scope,
                                 const std::vector<FieldMatch> &match);

}  // namespace xfsm

#endif  // XFSM_PROGRAM_H_
