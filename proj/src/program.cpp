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

#include "program.h"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "error.h"
#include "values.h"

namespace xfsm {

namespace {

class Loader {
 public:
  explicit Loader(ProgramDef *def) : def_(def) { }

  [[noreturn]] void fail(const YAML::Node &n, const std::string &path,
                         const std::string &msg) const {
    int line = n.IsDefined() ? n.Mark().line + 1 : last_line_;
    throw Error(ErrorCode::kSchemaError,
                "line " + std::to_string(line) + ": " + path + ": " + msg);
  }

  void expect_map(const YAML::Node &n, const std::string &path,
                  std::initializer_list<const char *> keys) {
    if (!n.IsMap()) fail(n, path, "expected a mapping");
    last_line_ = n.Mark().line + 1;
    for (const auto &kv : n) {
      auto k = kv.first.Scalar();
      if (std::find_if(keys.begin(), keys.end(), [&](const char *s) {
            return k == s;
          }) == keys.end())
        fail(kv.first, path, "unknown key '" + k + "'");
    }
  }

  uint64_t uint(const YAML::Node &n, const std::string &path,
                uint64_t max = UINT64_MAX) const {
    if (!n.IsScalar()) fail(n, path, "expected an integer");
    uint64_t v;
    try {
      v = parse_uint(n.Scalar());
    } catch (const Error &) {
      fail(n, path, "expected an integer, got '" + n.Scalar() + "'");
    }
    if (v > max) fail(n, path, "value above " + std::to_string(max));
    return v;
  }

  bool boolean(const YAML::Node &n, const std::string &path) const {
    bool b;
    if (!n.IsScalar() || !YAML::convert<bool>::decode(n, b))
      fail(n, path, "expected true or false");
    return b;
  }

  FieldId field(const YAML::Node &n, const std::string &path) const {
    if (!n.IsScalar()) fail(n, path, "expected a field name");
    auto f = field_from_name(n.Scalar());
    if (!f) fail(n, path, "unknown field '" + n.Scalar() + "'");
    return *f;
  }

  std::vector<FieldId> scope(const YAML::Node &n, const std::string &path) {
    if (!n.IsSequence()) fail(n, path, "expected a list of fields");
    std::vector<FieldId> out;
    for (std::size_t i = 0; i < n.size(); i++)
      out.push_back(field(n[i], path + "[" + std::to_string(i) + "]"));
    try {
      ScopeSpec check(out);
    } catch (const Error &e) {
      fail(n, path, e.what());
    }
    return out;
  }

  StateLabel label(const YAML::Node &n, const std::string &path) const {
    if (!n.IsScalar()) fail(n, path, "expected a state label");
    const auto &s = n.Scalar();
    if (s == "DEFAULT") return kDefaultState;
    auto it = def_->state_names.find(s);
    if (it != def_->state_names.end()) return it->second;
    try {
      uint64_t v = parse_uint(s);
      if (v <= 0xffffffff) return static_cast<StateLabel>(v);
    } catch (const Error &) {
    }
    fail(n, path, "unknown state '" + s + "'");
  }

  StateMatch state_match(const YAML::Node &n, const std::string &path) {
    if (!n.IsDefined() || (n.IsScalar() && n.Scalar() == "any"))
      return StateMatch::any();
    if (n.IsScalar() && n.Scalar() == "null") return StateMatch::null_state();
    if (n.IsNull()) return StateMatch::null_state();
    if (n.IsMap()) {
      expect_map(n, path, {"value", "mask"});
      auto v = static_cast<StateLabel>(uint(n["value"], path + ".value", 0xffffffff));
      auto m = static_cast<StateLabel>(uint(n["mask"], path + ".mask", 0xffffffff));
      if (v & ~m) fail(n, path, "state value has bits outside the mask");
      return StateMatch::label(v, m);
    }
    return StateMatch::label(label(n, path));
  }

  std::vector<FieldMatch> matches(const YAML::Node &n,
                                  const std::string &path) {
    std::vector<FieldMatch> out;
    if (!n.IsDefined()) return out;
    if (!n.IsMap()) fail(n, path, "expected a mapping of field: value");
    for (const auto &kv : n) {
      auto f = field(kv.first, path);
      std::string p = path + "." + kv.first.Scalar();
      const auto &v = kv.second;
      try {
        if (v.IsMap()) {
          expect_map(v, p, {"value", "mask"});
          uint64_t value = parse_field_value(f, scalar(v["value"], p + ".value"));
          uint64_t mask = parse_field_value(f, scalar(v["mask"], p + ".mask"));
          if (value & ~mask) fail(v, p, "value has bits outside the mask");
          out.push_back({f, value, mask});
        } else {
          auto vm = parse_field_match(f, scalar(v, p));
          out.push_back({f, vm.value, vm.mask});
        }
      } catch (const Error &e) {
        if (e.code() == ErrorCode::kSchemaError) throw;
        fail(v, p, e.what());
      }
    }
    return out;
  }

  const std::string &scalar(const YAML::Node &n, const std::string &path) const {
    if (!n.IsDefined()) fail(n, path, "missing");
    if (!n.IsScalar()) fail(n, path, "expected a scalar");
    return n.Scalar();
  }

  Action action(const YAML::Node &n, const std::string &path) {
    if (n.IsScalar()) {
      const auto &s = n.Scalar();
      if (s == "drop") return action::Drop{};
      if (s == "flood") return action::Flood{};
      if (s == "output_to_state") return action::OutputToState{};
      if (s == "pop_label") return action::PopLabel{};
      fail(n, path, "unknown action '" + s + "'");
    }
    if (!n.IsMap() || n.size() != 1)
      fail(n, path, "expected an action name or a one-key mapping");
    auto kv = *n.begin();
    const auto &name = kv.first.Scalar();
    std::string p = path + "." + name;
    if (name == "output")
      return action::Output{static_cast<uint32_t>(uint(kv.second, p, 0xffffffff))};
    if (name == "push_label")
      return action::PushLabel{static_cast<uint32_t>(uint(kv.second, p, 0xfffff))};
    if (name == "meter")
      return action::Meter{static_cast<uint32_t>(uint(kv.second, p, 0xffffffff))};
    if (name == "set_field") {
      const auto &m = kv.second;
      if (!m.IsMap() || m.size() != 1)
        fail(m, p, "expected a single field: value");
      auto fkv = *m.begin();
      auto f = field(fkv.first, p);
      try {
        return action::SetField{f, parse_field_value(f, scalar(fkv.second, p))};
      } catch (const Error &e) {
        if (e.code() == ErrorCode::kSchemaError) throw;
        fail(fkv.second, p, e.what());
      }
    }
    fail(kv.first, path, "unknown action '" + name + "'");
  }

  SetState set_state(const YAML::Node &n, const std::string &path) {
    expect_map(n, path,
               {"next", "timeout_us", "to_state", "mask", "from_field",
                "update_scope"});
    SetState s;
    if (n["from_field"]) {
      if (n["next"]) fail(n, path, "next and from_field are exclusive");
      s.next_from_field = field(n["from_field"], path + ".from_field");
    } else {
      if (!n["next"]) fail(n, path, "missing next");
      s.next = label(n["next"], path + ".next");
    }
    if (n["timeout_us"]) s.timeout_us = uint(n["timeout_us"], path + ".timeout_us");
    if (n["to_state"]) s.to_state = label(n["to_state"], path + ".to_state");
    if (n["mask"])
      s.mask = static_cast<StateLabel>(uint(n["mask"], path + ".mask", 0xffffffff));
    if (n["update_scope"])
      s.update_scope = ScopeSpec(scope(n["update_scope"], path + ".update_scope"));
    return s;
  }

  XfsmEntry entry(const YAML::Node &n, const std::string &path) {
    expect_map(n, path,
               {"priority", "state", "match", "actions", "set_state", "goto"});
    XfsmEntry e;
    if (n["priority"])
      e.priority = static_cast<uint32_t>(uint(n["priority"], path + ".priority", 0xffffffff));
    e.state = state_match(n["state"], path + ".state");
    e.match = matches(n["match"], path + ".match");
    if (const auto &a = n["actions"]) {
      if (!a.IsSequence()) fail(a, path + ".actions", "expected a list");
      for (std::size_t i = 0; i < a.size(); i++)
        e.actions.push_back(
            action(a[i], path + ".actions[" + std::to_string(i) + "]"));
    }
    if (n["set_state"]) e.set_state = set_state(n["set_state"], path + ".set_state");
    if (n["goto"])
      e.goto_table = static_cast<uint8_t>(uint(n["goto"], path + ".goto", 255));
    return e;
  }

  TableDef table(const YAML::Node &n, const std::string &path) {
    expect_map(n, path,
               {"table", "stateful", "lookup_scope", "update_scope",
                "xfsm_capacity", "state_table", "entries", "exceptions",
                "states"});
    TableDef t;
    if (!n["table"]) fail(n, path, "missing table");
    t.id = static_cast<uint8_t>(uint(n["table"], path + ".table", 254));
    if (n["lookup_scope"]) t.lookup_scope = scope(n["lookup_scope"], path + ".lookup_scope");
    if (n["update_scope"]) t.update_scope = scope(n["update_scope"], path + ".update_scope");
    t.stateful = n["stateful"] ? boolean(n["stateful"], path + ".stateful")
                               : t.lookup_scope.has_value();
    if (n["xfsm_capacity"])
      t.xfsm_capacity = uint(n["xfsm_capacity"], path + ".xfsm_capacity", 1u << 20);
    if (const auto &g = n["state_table"]) {
      expect_map(g, path + ".state_table", {"buckets", "cells"});
      if (g["buckets"]) t.state_buckets = uint(g["buckets"], path + ".state_table.buckets", 1u << 20);
      if (g["cells"]) t.state_cells = uint(g["cells"], path + ".state_table.cells", 64);
    }
    if (const auto &es = n["entries"]) {
      if (!es.IsSequence()) fail(es, path + ".entries", "expected a list");
      for (std::size_t i = 0; i < es.size(); i++)
        t.entries.push_back(
            entry(es[i], path + ".entries[" + std::to_string(i) + "]"));
    }
    if (const auto &xs = n["exceptions"]) {
      if (!xs.IsSequence()) fail(xs, path + ".exceptions", "expected a list");
      for (std::size_t i = 0; i < xs.size(); i++) {
        std::string p = path + ".exceptions[" + std::to_string(i) + "]";
        expect_map(xs[i], p, {"match", "priority", "state"});
        ExceptionDef x;
        x.match = matches(xs[i]["match"], p + ".match");
        if (xs[i]["priority"])
          x.priority = static_cast<uint32_t>(uint(xs[i]["priority"], p + ".priority", 0xffffffff));
        if (!xs[i]["state"]) fail(xs[i], p, "missing state");
        x.state = label(xs[i]["state"], p + ".state");
        t.exceptions.push_back(std::move(x));
      }
    }
    if (const auto &ss = n["states"]) {
      if (!ss.IsSequence()) fail(ss, path + ".states", "expected a list");
      if (!t.lookup_scope) fail(ss, path + ".states", "table has no lookup_scope");
      for (std::size_t i = 0; i < ss.size(); i++) {
        std::string p = path + ".states[" + std::to_string(i) + "]";
        const auto &s = ss[i];
        expect_map(s, p, {"key", "state", "timeout_us", "to_state"});
        InitialState st;
        const auto &k = s["key"];
        if (!k.IsMap()) fail(k, p + ".key", "expected a mapping of field: value");
        for (auto f : *t.lookup_scope) {
          std::string name(field_info(f).name);
          if (!k[name]) fail(k, p + ".key", "missing scope field " + name);
          try {
            st.key.push_back(parse_field_value(f, scalar(k[name], p + ".key." + name)));
          } catch (const Error &e) {
            if (e.code() == ErrorCode::kSchemaError) throw;
            fail(k[name], p + ".key." + name, e.what());
          }
        }
        if (k.size() != t.lookup_scope->size())
          fail(k, p + ".key", "key has fields outside the lookup scope");
        if (!s["state"]) fail(s, p, "missing state");
        st.state = label(s["state"], p + ".state");
        if (s["timeout_us"]) st.timeout_us = uint(s["timeout_us"], p + ".timeout_us");
        if (s["to_state"]) st.to_state = label(s["to_state"], p + ".to_state");
        t.states.push_back(std::move(st));
      }
    }
    return t;
  }

  MeterDef meter(const YAML::Node &n, const std::string &path) {
    expect_map(n, path, {"id", "unit", "bands"});
    MeterDef m;
    if (!n["id"]) fail(n, path, "missing id");
    m.id = static_cast<uint32_t>(uint(n["id"], path + ".id", 0xffffffff));
    if (const auto &u = n["unit"]) {
      const auto &s = scalar(u, path + ".unit");
      if (s == "packets")
        m.unit = MeterUnit::kPackets;
      else if (s == "bytes")
        m.unit = MeterUnit::kBytes;
      else
        fail(u, path + ".unit", "expected packets or bytes");
    }
    const auto &bands = n["bands"];
    if (!bands.IsSequence() || bands.size() == 0)
      fail(bands, path + ".bands", "expected a non-empty list");
    for (std::size_t i = 0; i < bands.size(); i++) {
      std::string p = path + ".bands[" + std::to_string(i) + "]";
      expect_map(bands[i], p, {"rate", "burst", "dscp_remark"});
      MeterBand b;
      b.rate = uint(bands[i]["rate"], p + ".rate");
      b.burst = uint(bands[i]["burst"], p + ".burst");
      b.dscp_remark = static_cast<uint8_t>(uint(bands[i]["dscp_remark"], p + ".dscp_remark", 63));
      m.bands.push_back(b);
    }
    return m;
  }

  void program(const YAML::Node &root) {
    expect_map(root, "$", {"switch", "state_names", "meters", "tables"});
    const auto &sw = root["switch"];
    if (!sw) fail(root, "$", "missing switch section");
    expect_map(sw, "switch", {"ports"});
    if (!sw["ports"]) fail(sw, "switch", "missing ports");
    def_->ports = static_cast<uint32_t>(uint(sw["ports"], "switch.ports", 0xfffffff0));
    if (def_->ports == 0) fail(sw["ports"], "switch.ports", "need at least one port");
    if (const auto &names = root["state_names"]) {
      if (!names.IsMap()) fail(names, "state_names", "expected a mapping");
      for (const auto &kv : names) {
        std::string p = "state_names." + kv.first.Scalar();
        def_->state_names[kv.first.Scalar()] =
            static_cast<StateLabel>(uint(kv.second, p, 0xffffffff));
      }
    }
    if (const auto &ms = root["meters"]) {
      if (!ms.IsSequence()) fail(ms, "meters", "expected a list");
      std::set<uint32_t> ids;
      for (std::size_t i = 0; i < ms.size(); i++) {
        std::string p = "meters[" + std::to_string(i) + "]";
        auto m = meter(ms[i], p);
        if (!ids.insert(m.id).second) fail(ms[i], p, "duplicate meter id");
        def_->meters.push_back(std::move(m));
      }
    }
    const auto &ts = root["tables"];
    if (!ts.IsSequence()) fail(ts, "tables", "expected a list");
    std::set<uint8_t> ids;
    for (std::size_t i = 0; i < ts.size(); i++) {
      std::string p = "tables[" + std::to_string(i) + "]";
      auto t = table(ts[i], p);
      if (!ids.insert(t.id).second) fail(ts[i], p, "duplicate table id");
      def_->tables.push_back(std::move(t));
    }
  }

 private:
  ProgramDef *def_;
  int last_line_{1};
};

// --- writer ---

class Writer {
 public:
  explicit Writer(const ProgramDef &def) : def_(def) {
    for (const auto &[name, label] : def.state_names)
      names_.emplace(label, name);
  }

  void label(YAML::Emitter &out, StateLabel l) const {
    auto it = names_.find(l);
    if (it != names_.end())
      out << it->second;
    else if (l == kDefaultState)
      out << "DEFAULT";
    else
      out << l;
  }

  void match(YAML::Emitter &out, const std::vector<FieldMatch> &m) const {
    out << YAML::Flow << YAML::BeginMap;
    for (const auto &fm : m) {
      out << YAML::Key << std::string(field_info(fm.field).name) << YAML::Value;
      if (fm.mask == field_max(fm.field))
        out << format_field_value(fm.field, fm.value);
      else
        out << format_field_value(fm.field, fm.value) + "/" +
                   format_field_value(fm.field, fm.mask);
    }
    out << YAML::EndMap;
  }

  void scope(YAML::Emitter &out, const std::vector<FieldId> &fields) const {
    out << YAML::Flow << YAML::BeginSeq;
    for (auto f : fields) out << std::string(field_info(f).name);
    out << YAML::EndSeq;
  }

  void action(YAML::Emitter &out, const Action &a) const {
    std::visit(
        [&](const auto &act) {
          using T = std::decay_t<decltype(act)>;
          if constexpr (std::is_same_v<T, action::Drop>) {
            out << "drop";
          } else if constexpr (std::is_same_v<T, action::Flood>) {
            out << "flood";
          } else if constexpr (std::is_same_v<T, action::OutputToState>) {
            out << "output_to_state";
          } else if constexpr (std::is_same_v<T, action::PopLabel>) {
            out << "pop_label";
          } else if constexpr (std::is_same_v<T, action::Output>) {
            out << YAML::Flow << YAML::BeginMap << YAML::Key << "output"
                << YAML::Value << act.port << YAML::EndMap;
          } else if constexpr (std::is_same_v<T, action::PushLabel>) {
            out << YAML::Flow << YAML::BeginMap << YAML::Key << "push_label"
                << YAML::Value << act.label << YAML::EndMap;
          } else if constexpr (std::is_same_v<T, action::Meter>) {
            out << YAML::Flow << YAML::BeginMap << YAML::Key << "meter"
                << YAML::Value << act.meter_id << YAML::EndMap;
          } else if constexpr (std::is_same_v<T, action::SetField>) {
            out << YAML::Flow << YAML::BeginMap << YAML::Key << "set_field"
                << YAML::Value << YAML::BeginMap
                << YAML::Key << std::string(field_info(act.field).name)
                << YAML::Value << format_field_value(act.field, act.value)
                << YAML::EndMap << YAML::EndMap;
          }
        },
        a);
  }

  void entry(YAML::Emitter &out, const XfsmEntry &e) const {
    out << YAML::BeginMap;
    out << YAML::Key << "priority" << YAML::Value << e.priority;
    switch (e.state.kind) {
      case StateMatch::Kind::kAny:
        break;
      case StateMatch::Kind::kNull:
        out << YAML::Key << "state" << YAML::Value << "null";
        break;
      case StateMatch::Kind::kLabel:
        out << YAML::Key << "state" << YAML::Value;
        if (e.state.mask == 0xffffffff) {
          label(out, e.state.value);
        } else {
          out << YAML::Flow << YAML::BeginMap << YAML::Key << "value"
              << YAML::Value << YAML::Hex << e.state.value << YAML::Key
              << "mask" << YAML::Value << e.state.mask << YAML::Dec
              << YAML::EndMap;
        }
        break;
    }
    if (!e.match.empty()) {
      out << YAML::Key << "match" << YAML::Value;
      match(out, e.match);
    }
    if (!e.actions.empty()) {
      out << YAML::Key << "actions" << YAML::Value << YAML::Flow
          << YAML::BeginSeq;
      for (const auto &a : e.actions) action(out, a);
      out << YAML::EndSeq;
    }
    if (e.set_state) {
      const auto &s = *e.set_state;
      out << YAML::Key << "set_state" << YAML::Value << YAML::Flow
          << YAML::BeginMap;
      if (s.next_from_field) {
        out << YAML::Key << "from_field" << YAML::Value
            << std::string(field_info(*s.next_from_field).name);
      } else {
        out << YAML::Key << "next" << YAML::Value;
        label(out, s.next);
      }
      if (s.timeout_us) {
        out << YAML::Key << "timeout_us" << YAML::Value << s.timeout_us;
        out << YAML::Key << "to_state" << YAML::Value;
        label(out, s.to_state);
      } else if (s.to_state != kDefaultState) {
        out << YAML::Key << "to_state" << YAML::Value;
        label(out, s.to_state);
      }
      if (s.mask != 0xffffffff)
        out << YAML::Key << "mask" << YAML::Value << YAML::Hex << s.mask
            << YAML::Dec;
      if (s.update_scope) {
        out << YAML::Key << "update_scope" << YAML::Value;
        scope(out, s.update_scope->fields());
      }
      out << YAML::EndMap;
    }
    if (e.goto_table)
      out << YAML::Key << "goto" << YAML::Value
          << static_cast<unsigned>(*e.goto_table);
    out << YAML::EndMap;
  }

  void table(YAML::Emitter &out, const TableDef &t) const {
    out << YAML::BeginMap;
    out << YAML::Key << "table" << YAML::Value << static_cast<unsigned>(t.id);
    out << YAML::Key << "stateful" << YAML::Value << t.stateful;
    if (t.lookup_scope) {
      out << YAML::Key << "lookup_scope" << YAML::Value;
      scope(out, *t.lookup_scope);
    }
    if (t.update_scope) {
      out << YAML::Key << "update_scope" << YAML::Value;
      scope(out, *t.update_scope);
    }
    if (t.xfsm_capacity != 128)
      out << YAML::Key << "xfsm_capacity" << YAML::Value << t.xfsm_capacity;
    if (t.state_buckets || t.state_cells) {
      out << YAML::Key << "state_table" << YAML::Value << YAML::Flow
          << YAML::BeginMap;
      if (t.state_buckets)
        out << YAML::Key << "buckets" << YAML::Value << *t.state_buckets;
      if (t.state_cells)
        out << YAML::Key << "cells" << YAML::Value << *t.state_cells;
      out << YAML::EndMap;
    }
    out << YAML::Key << "entries" << YAML::Value << YAML::BeginSeq;
    for (const auto &e : t.entries) entry(out, e);
    out << YAML::EndSeq;
    if (!t.exceptions.empty()) {
      out << YAML::Key << "exceptions" << YAML::Value << YAML::BeginSeq;
      for (const auto &x : t.exceptions) {
        out << YAML::Flow << YAML::BeginMap;
        out << YAML::Key << "match" << YAML::Value;
        match(out, x.match);
        out << YAML::Key << "priority" << YAML::Value << x.priority;
        out << YAML::Key << "state" << YAML::Value;
        label(out, x.state);
        out << YAML::EndMap;
      }
      out << YAML::EndSeq;
    }
    if (!t.states.empty()) {
      out << YAML::Key << "states" << YAML::Value << YAML::BeginSeq;
      for (const auto &s : t.states) {
        out << YAML::Flow << YAML::BeginMap;
        out << YAML::Key << "key" << YAML::Value << YAML::BeginMap;
        for (std::size_t i = 0; i < s.key.size(); i++) {
          auto f = (*t.lookup_scope)[i];
          out << YAML::Key << std::string(field_info(f).name) << YAML::Value
              << format_field_value(f, s.key[i]);
        }
        out << YAML::EndMap;
        out << YAML::Key << "state" << YAML::Value;
        label(out, s.state);
        if (s.timeout_us)
          out << YAML::Key << "timeout_us" << YAML::Value << s.timeout_us;
        if (s.to_state != kDefaultState) {
          out << YAML::Key << "to_state" << YAML::Value;
          label(out, s.to_state);
        }
        out << YAML::EndMap;
      }
      out << YAML::EndSeq;
    }
    out << YAML::EndMap;
  }

  std::string write() const {
    YAML::Emitter out;
    out << YAML::BeginMap;
    out << YAML::Key << "switch" << YAML::Value << YAML::BeginMap
        << YAML::Key << "ports" << YAML::Value << def_.ports << YAML::EndMap;
    if (!def_.state_names.empty()) {
      out << YAML::Key << "state_names" << YAML::Value << YAML::BeginMap;
      for (const auto &[name, l] : def_.state_names)
        out << YAML::Key << name << YAML::Value << l;
      out << YAML::EndMap;
    }
    if (!def_.meters.empty()) {
      out << YAML::Key << "meters" << YAML::Value << YAML::BeginSeq;
      for (const auto &m : def_.meters) {
        out << YAML::BeginMap;
        out << YAML::Key << "id" << YAML::Value << m.id;
        out << YAML::Key << "unit" << YAML::Value
            << (m.unit == MeterUnit::kPackets ? "packets" : "bytes");
        out << YAML::Key << "bands" << YAML::Value << YAML::BeginSeq;
        for (const auto &b : m.bands)
          out << YAML::Flow << YAML::BeginMap << YAML::Key << "rate"
              << YAML::Value << b.rate << YAML::Key << "burst" << YAML::Value
              << b.burst << YAML::Key << "dscp_remark" << YAML::Value
              << static_cast<unsigned>(b.dscp_remark) << YAML::EndMap;
        out << YAML::EndSeq << YAML::EndMap;
      }
      out << YAML::EndSeq;
    }
    out << YAML::Key << "tables" << YAML::Value << YAML::BeginSeq;
    for (const auto &t : def_.tables) table(out, t);
    out << YAML::EndSeq;
    out << YAML::EndMap;
    return std::string(out.c_str()) + "\n";
  }

 private:
  const ProgramDef &def_;
  std::map<StateLabel, std::string> names_;
};

}  // namespace

ProgramDef parse_program(const std::string &text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception &e) {
    throw Error(ErrorCode::kSchemaError,
                "line " + std::to_string(e.mark.line + 1) + ": $: " + e.msg);
  }
  ProgramDef def;
  Loader(&def).program(root);
  return def;
}

ProgramDef load_program(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_program(ss.str());
}

std::string write_program(const ProgramDef &def) { return Writer(def).write(); }

TernaryPattern exception_pattern(const ScopeSpec &scope,
                                 const std::vector<FieldMatch> &match) {
  std::vector<uint8_t> value(kMaxKeyBytes, 0), mask(kMaxKeyBytes, 0);
  for (const auto &m : match) {
    std::size_t off = 0;
    bool found = false;
    for (auto f : scope.fields()) {
      if (f == m.field) {
        found = true;
        break;
      }
      off += field_bytes(f);
    }
    if (!found)
      throw Error(ErrorCode::kInvalidScope,
                  std::string(field_info(m.field).name) +
                      " is not in scope " + scope.to_string());
    auto n = field_bytes(m.field);
    for (std::size_t j = 0; j < n; j++) {
      value[off + n - 1 - j] = static_cast<uint8_t>(m.value >> (8 * j));
      mask[off + n - 1 - j] = static_cast<uint8_t>(m.mask >> (8 * j));
    }
  }
  return TernaryPattern(kMaxKeyBytes * 8, std::move(value), std::move(mask));
}

std::unique_ptr<Switch> instantiate(const ProgramDef &def) {
  auto sw = std::make_unique<Switch>(def.ports);
  for (const auto &m : def.meters) sw->add_meter(Meter(m.id, m.bands, m.unit));
  for (const auto &t : def.tables) {
    BlockOptions opts;
    opts.stateful = t.stateful;
    opts.xfsm_capacity = t.xfsm_capacity;
    if (t.state_buckets) opts.state_geometry.buckets = *t.state_buckets;
    if (t.state_cells) opts.state_geometry.cells = *t.state_cells;
    auto &block = sw->add_table(t.id, opts);
    if (t.lookup_scope) block.set_lookup_scope(ScopeSpec(*t.lookup_scope));
    if (t.update_scope) block.set_update_scope(ScopeSpec(*t.update_scope));
    for (const auto &e : t.entries) block.install_entry(e);
    if (!t.exceptions.empty() || !t.states.empty()) {
      if (!block.lookup_scope())
        throw Error(ErrorCode::kInvalidScope,
                    "table " + std::to_string(t.id) + " has no lookup scope");
    }
    for (const auto &x : t.exceptions)
      block.states().add_exception(
          exception_pattern(*block.lookup_scope(), x.match), x.priority,
          x.state);
    for (const auto &s : t.states)
      block.states().set_state(block.lookup_scope()->make_key(s.key), s.state,
                               s.timeout_us, s.to_state, 0);
  }
  sw->activate();
  return sw;
}

}  // namespace xfsm
