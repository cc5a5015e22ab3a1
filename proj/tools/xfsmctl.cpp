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

#include <CLI11.hpp>
#include <xfsm.h>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

struct Failure {
  xfsm_status status;
  std::string message;
};

void check(xfsm_status s) {
  if (s != XFSM_OK) throw Failure{s, xfsm_last_error()};
}

std::string take(char *p) {
  std::string s = p ? p : "";
  xfsm_free(p);
  return s;
}

std::string read_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Failure{XFSM_E_IO, "cannot open " + path};
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string &path, const std::string &text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Failure{XFSM_E_IO, "cannot write " + path};
  }
  out << text;
}

// Hex digits with optional whitespace; '#' starts a comment to end of line.
std::vector<uint8_t> parse_hex(const std::string &hex) {
  std::vector<uint8_t> out;
  std::string digits;
  bool comment = false;
  for (char c : hex) {
    auto u = static_cast<unsigned char>(c);
    if (c == '\n') comment = false;
    if (comment || std::isspace(u)) continue;
    if (c == '#') {
      comment = true;
    } else if (std::isxdigit(u)) {
      digits.push_back(c);
    } else {
      throw Failure{XFSM_E_INVALID_ARGUMENT,
                    std::string("unexpected character '") + c + "' in hex"};
    }
  }
  if (digits.size() % 2) {
    throw Failure{XFSM_E_INVALID_ARGUMENT, "odd number of hex digits"};
  }
  for (std::size_t i = 0; i < digits.size(); i += 2)
    out.push_back(static_cast<uint8_t>(std::stoul(digits.substr(i, 2), nullptr, 16)));
  return out;
}

std::string to_hex(const uint8_t *p, std::size_t n) {
  static const char *d = "0123456789abcdef";
  std::string s;
  for (std::size_t i = 0; i < n; i++) {
    s.push_back(d[p[i] >> 4]);
    s.push_back(d[p[i] & 0xf]);
  }
  return s;
}

class SwitchHandle {
 public:
  explicit SwitchHandle(xfsm_switch *sw) : sw_(sw) { }
  ~SwitchHandle() { xfsm_switch_destroy(sw_); }
  SwitchHandle(const SwitchHandle &) = delete;
  SwitchHandle &operator=(const SwitchHandle &) = delete;
  xfsm_switch *get() const { return sw_; }

 private:
  xfsm_switch *sw_;
};

SwitchHandle load(const std::string &program) {
  xfsm_switch *sw = nullptr;
  check(xfsm_switch_load_program(program.c_str(), &sw));
  return SwitchHandle(sw);
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"xfsmctl: stateful match-action switch simulator"};
  app.require_subcommand(1);
  std::string format = "json";
  app.add_option("--format", format, "Output format")
      ->check(CLI::IsMember({"json", "text"}));

  // run
  auto *run = app.add_subcommand("run", "Replay a trace through a program");
  std::string run_program, run_trace, run_log, run_dump;
  run->add_option("program", run_program, "Program file (YAML or JSON)")
      ->required()->check(CLI::ExistingFile);
  run->add_option("trace", run_trace, "Trace file (JSON lines)")
      ->required()->check(CLI::ExistingFile);
  run->add_option("--log", run_log, "Verdict log output (default stdout)");
  run->add_option("--dump", run_dump,
                  "Final state dump output (default: after the log)");

  // dump-state
  auto *dump = app.add_subcommand("dump-state", "Print flow states");
  std::string dump_program, dump_trace;
  uint64_t dump_at = 0;
  bool dump_at_set = false;
  dump->add_option("program", dump_program, "Program file")
      ->required()->check(CLI::ExistingFile);
  dump->add_option("--trace", dump_trace, "Replay this trace first")
      ->check(CLI::ExistingFile);
  dump->add_option("--at", dump_at, "Virtual time of the dump, microseconds")
      ->each([&](const std::string &) { dump_at_set = true; });

  // gen-program
  auto *gen = app.add_subcommand("gen-program", "Write a bundled program");
  std::string gen_kind, gen_out;
  uint32_t gen_ports = 4, gen_server_port = 2, gen_self_id = 1;
  bool gen_parametric = false;
  std::vector<uint32_t> gen_edge_ports{1, 2}, gen_switch_ids{2, 3};
  std::vector<std::string> gen_dests{"10.0.0.100"};
  uint64_t s1_rate = 100, s1_burst = 10, s2_rate = 400, s2_burst = 10;
  gen->add_option("kind", gen_kind, "Program")
      ->required()
      ->check(CLI::IsMember(
          {"mac-learning", "mpls-learning", "port-knocking", "ddos"}));
  gen->add_option("-o,--output", gen_out, "Output file (default stdout)");
  gen->add_option("--ports", gen_ports, "Switch ports");
  gen->add_flag("--parametric", gen_parametric,
                "mac-learning: N+1 entries using output-to-state");
  gen->add_option("--edge-ports", gen_edge_ports, "mpls-learning edge ports")
      ->delimiter(',');
  gen->add_option("--switch-ids", gen_switch_ids,
                  "mpls-learning remote switch ids")
      ->delimiter(',');
  gen->add_option("--self-id", gen_self_id, "mpls-learning local switch id");
  gen->add_option("--server-port", gen_server_port,
                  "port-knocking protected server port");
  gen->add_option("--dest", gen_dests, "ddos monitored destinations")
      ->delimiter(',');
  gen->add_option("--stage1-rate", s1_rate, "ddos stage 1 rate, packets/s");
  gen->add_option("--stage1-burst", s1_burst, "ddos stage 1 burst, packets");
  gen->add_option("--stage2-rate", s2_rate, "ddos stage 2 rate, packets/s");
  gen->add_option("--stage2-burst", s2_burst, "ddos stage 2 burst, packets");

  // gen-trace
  auto *gtrace = app.add_subcommand("gen-trace", "Write a synthetic trace");
  xfsm_trace_spec spec;
  xfsm_trace_spec_init(&spec);
  std::string trace_kind = "mac", trace_out;
  gtrace->add_option("--kind", trace_kind, "Trace kind")
      ->check(CLI::IsMember({"mac", "knock", "ddos"}));
  gtrace->add_option("--seed", spec.seed, "RNG seed");
  gtrace->add_option("--ports", spec.ports, "Ports (mac)");
  gtrace->add_option("--hosts", spec.hosts, "Hosts");
  gtrace->add_option("--packets", spec.packets, "Packets");
  gtrace->add_option("--interval-us", spec.interval_us,
                     "Spacing between packets");
  gtrace->add_option("--broadcast-permille", spec.broadcast_permille,
                     "Broadcast share (mac)");
  gtrace->add_option("--move-permille", spec.move_permille,
                     "Host move share (mac)");
  gtrace->add_option("-o,--output", trace_out, "Output file (default stdout)");

  // hazard
  auto *hazard = app.add_subcommand("hazard", "Feedback-loop hazard model");
  uint32_t hz_ports = 1, hz_latency = 5;
  std::string hz_schedule;
  bool hz_strict = false, hz_min_safe = false;
  hazard->add_option("--ports", hz_ports, "Mixer input ports");
  hazard->add_option("--latency", hz_latency, "Lookup-to-update latency, cycles");
  hazard->add_option("--schedule", hz_schedule, "Arrival schedule (JSON)")
      ->check(CLI::ExistingFile);
  hazard->add_flag("--strict", hz_strict,
                   "Non-work-conserving round robin (fixed slots)");
  hazard->add_flag("--min-safe", hz_min_safe,
                   "Print the smallest hazard-free port count for --latency");

  // send-msg
  auto *send = app.add_subcommand("send-msg", "Apply raw control messages");
  std::string send_program, send_hex, send_hex_file;
  uint32_t send_ports = 4;
  std::vector<int> send_tables;
  std::vector<int> send_stateful_tables;
  send->add_option("--program", send_program, "Start from this program")
      ->check(CLI::ExistingFile);
  send->add_option("--ports", send_ports,
                   "Ports of an empty switch (without --program)");
  send->add_option("--tables", send_tables,
                   "Stateless tables of an empty switch")
      ->delimiter(',');
  send->add_option("--stateful-tables", send_stateful_tables,
                   "Stateful tables of an empty switch")
      ->delimiter(',');
  send->add_option("--hex", send_hex, "Messages as hex");
  send->add_option("--hex-file", send_hex_file, "File holding hex messages")
      ->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    // --help and --version exit 0; every usage error exits 2
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  const xfsm_format fmt = format == "text" ? XFSM_FORMAT_TEXT : XFSM_FORMAT_JSON;

  try {
    if (*run) {
      auto sw = load(run_program);
      auto trace = read_file(run_trace);
      char *log = nullptr;
      uint64_t last_ts = 0;
      check(xfsm_switch_run_trace(sw.get(), trace.c_str(), fmt, &log, &last_ts));
      char *state = nullptr;
      check(xfsm_switch_dump_state(sw.get(), last_ts, fmt, &state));
      std::string state_text = take(state);
      if (fmt == XFSM_FORMAT_JSON) state_text += "\n";
      if (run_log.empty() && run_dump.empty()) {
        write_output("-", take(log) + state_text);
      } else {
        write_output(run_log, take(log));
        write_output(run_dump, state_text);
      }
    } else if (*dump) {
      auto sw = load(dump_program);
      uint64_t last_ts = 0;
      if (!dump_trace.empty()) {
        auto trace = read_file(dump_trace);
        check(xfsm_switch_run_trace(sw.get(), trace.c_str(), fmt, nullptr,
                                    &last_ts));
      }
      char *state = nullptr;
      check(xfsm_switch_dump_state(sw.get(), dump_at_set ? dump_at : last_ts,
                                   fmt, &state));
      std::string text = take(state);
      if (fmt == XFSM_FORMAT_JSON) text += "\n";
      write_output("-", text);
    } else if (*gen) {
      char *yaml = nullptr;
      if (gen_kind == "mac-learning") {
        check(xfsm_gen_mac_learning(gen_ports, gen_parametric, &yaml));
      } else if (gen_kind == "mpls-learning") {
        check(xfsm_gen_mpls_learning(gen_edge_ports.data(), gen_edge_ports.size(),
                                     gen_switch_ids.data(), gen_switch_ids.size(),
                                     gen_self_id, &yaml));
      } else if (gen_kind == "port-knocking") {
        check(xfsm_gen_port_knocking(gen->count("--ports") ? gen_ports : 2,
                                     gen_server_port, &yaml));
      } else {
        std::vector<const char *> dests;
        for (const auto &d : gen_dests) dests.push_back(d.c_str());
        check(xfsm_gen_ddos(dests.data(), dests.size(), s1_rate, s1_burst,
                            s2_rate, s2_burst, &yaml));
      }
      write_output(gen_out, take(yaml));
    } else if (*gtrace) {
      spec.kind = trace_kind.c_str();
      char *text = nullptr;
      check(xfsm_gen_trace(&spec, &text));
      write_output(trace_out, take(text));
    } else if (*hazard) {
      if (hz_min_safe) {
        uint32_t n = 0;
        check(xfsm_min_safe_ports(hz_latency, 1, &n));
        if (fmt == XFSM_FORMAT_JSON)
          std::cout << "{\"latency\":" << hz_latency
                    << ",\"min_safe_ports\":" << n << "}\n";
        else
          std::cout << "latency " << hz_latency << ": " << n << " ports\n";
      } else {
        if (hz_schedule.empty()) {
          std::cerr << "error: hazard needs --schedule or --min-safe\n";
          return 2;
        }
        auto sched = read_file(hz_schedule);
        char *report = nullptr;
        check(xfsm_hazard_simulate(sched.c_str(), hz_ports, hz_latency,
                                   hz_strict, &report));
        std::cout << take(report) << "\n";
      }
    } else if (*send) {
      xfsm_switch *raw = nullptr;
      if (!send_program.empty()) {
        check(xfsm_switch_load_program(send_program.c_str(), &raw));
      } else {
        check(xfsm_switch_create(send_ports, &raw));
      }
      SwitchHandle sw(raw);
      for (int t : send_tables)
        check(xfsm_switch_add_table(sw.get(), static_cast<uint8_t>(t), 0));
      for (int t : send_stateful_tables)
        check(xfsm_switch_add_table(sw.get(), static_cast<uint8_t>(t), 1));
      std::string hex = send_hex;
      if (!send_hex_file.empty()) hex += read_file(send_hex_file);
      auto bytes = parse_hex(hex);
      char *desc = nullptr;
      check(xfsm_describe_messages(bytes.data(), bytes.size(), &desc));
      std::string described = take(desc);
      uint8_t *reply = nullptr;
      size_t reply_len = 0;
      check(xfsm_switch_apply_message(sw.get(), bytes.data(), bytes.size(), 0,
                                      &reply, &reply_len));
      std::string reply_hex = reply ? to_hex(reply, reply_len) : "";
      xfsm_free(reply);
      uint32_t caps = 0;
      check(xfsm_switch_capabilities(sw.get(), &caps));
      char *state = nullptr;
      check(xfsm_switch_dump_state(sw.get(), 0, fmt, &state));
      if (fmt == XFSM_FORMAT_JSON) {
        std::cout << "{\"messages\":" << described << ",\"reply_hex\":\""
                  << reply_hex << "\",\"capabilities\":" << caps
                  << ",\"state\":" << take(state) << "}\n";
      } else {
        std::cout << "messages: " << described << "\n";
        if (!reply_hex.empty()) std::cout << "reply: " << reply_hex << "\n";
        std::cout << "capabilities: 0x" << std::hex << caps << std::dec << "\n"
                  << take(state);
      }
    }
  } catch (const Failure &f) {
    std::cerr << "error: " << xfsm_status_name(f.status) << ": " << f.message
              << "\n";
    return 1;
  }
  return 0;
}
