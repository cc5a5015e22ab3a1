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

#include "hazard.h"

#include <deque>
#include <unordered_map>

#include "error.h"

namespace xfsm {

namespace {

void validate(const HazardConfig &cfg) {
  if (cfg.latency < 1)
    throw Error(ErrorCode::kInvalidArgument, "latency must be >= 1");
  if (cfg.num_ports < 1)
    throw Error(ErrorCode::kInvalidArgument, "need at least one port");
  if (cfg.schedules.size() > cfg.num_ports)
    throw Error(ErrorCode::kInvalidArgument,
                std::to_string(cfg.schedules.size()) + " schedules for " +
                    std::to_string(cfg.num_ports) + " ports");
  for (std::size_t p = 0; p < cfg.schedules.size(); p++) {
    const auto &s = cfg.schedules[p];
    for (std::size_t i = 1; i < s.size(); i++)
      if (s[i].cycle <= s[i - 1].cycle)
        throw Error(ErrorCode::kInvalidArgument,
                    "port " + std::to_string(p) +
                        " schedule not strictly increasing at index " +
                        std::to_string(i));
  }
}

}  // namespace

HazardReport simulate(const HazardConfig &cfg) {
  validate(cfg);
  const uint32_t n = cfg.num_ports;
  std::vector<std::size_t> next(cfg.schedules.size(), 0);  // next arrival
  std::vector<std::deque<const Arrival *>> queues(n);
  std::size_t pending = 0;
  for (const auto &s : cfg.schedules) pending += s.size();

  HazardReport report;
  std::unordered_map<std::string, uint64_t> last_emit;
  uint32_t rr = 0;
  for (uint64_t t = 0; pending > 0; t++) {
    for (std::size_t p = 0; p < cfg.schedules.size(); p++) {
      const auto &s = cfg.schedules[p];
      if (next[p] < s.size() && s[next[p]].cycle == t)
        queues[p].push_back(&s[next[p]++]);
    }
    uint32_t port = n;
    if (cfg.mode == MixerMode::kStrict) {
      if (!queues[t % n].empty()) port = static_cast<uint32_t>(t % n);
    } else {
      for (uint32_t i = 0; i < n; i++) {
        uint32_t p = (rr + i) % n;
        if (!queues[p].empty()) {
          port = p;
          break;
        }
      }
    }
    if (port == n) continue;
    rr = (port + 1) % n;
    const Arrival *a = queues[port].front();
    queues[port].pop_front();
    pending--;
    auto it = last_emit.find(a->flow);
    if (it != last_emit.end() && t - it->second < cfg.latency)
      report.hazards.push_back({t, a->flow, it->second});
    last_emit[a->flow] = t;
    report.processed.push_back({t, port, a->cycle, a->flow});
  }
  return report;
}

uint32_t min_safe_ports(uint32_t latency, MixerMode mode) {
  if (latency < 1)
    throw Error(ErrorCode::kInvalidArgument, "latency must be >= 1");
  const uint64_t burst = 2ull * latency + 2;
  for (uint32_t n = 1;; n++) {
    bool safe = true;
    for (uint32_t victim = 0; victim < n && safe; victim++) {
      HazardConfig cfg;
      cfg.latency = latency;
      cfg.num_ports = n;
      cfg.mode = mode;
      cfg.schedules.resize(n);
      for (uint32_t p = 0; p < n; p++) {
        if (p != victim && mode == MixerMode::kStrict) continue;
        for (uint64_t c = 0; c < burst; c++)
          cfg.schedules[p].push_back(
              {c, p == victim ? "victim"
                              : "bg" + std::to_string(p) + "." +
                                    std::to_string(c)});
      }
      for (const auto &h : simulate(cfg).hazards)
        if (h.flow == "victim") safe = false;
    }
    if (safe) return n;
  }
}

}  // namespace xfsm
