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

// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <cstdio>
#include <exception>
#include <functional>
#include <iterator>
#include <string>

#include "checks.h"

namespace {

struct Criterion {
  int id;
  const char *name;
  std::function<checks::Result()> run;
};

}  // namespace

int main() {
  const Criterion criteria[] = {
      {1, "port knocking machine", [] { return checks::knock_machine(); }},
      {2, "MAC learning vs oracle",
       [] { return checks::mac_learning(100, 10000); }},
      {3, "state precedence and rollback",
       [] { return checks::state_precedence(); }},
      {4, "ternary match vs linear scan",
       [] { return checks::tcam_oracle(10000, 1); }},
      {5, "wire codec", [] { return checks::wire_codec(1000, 1); }},
      {6, "hazard model", [] { return checks::hazard_model(100); }},
      {7, "DDoS pipeline scenario", [] { return checks::ddos_scenario(); }},
      {8, "match time, full vs parametric table",
       [] { return checks::match_timing(200000); }},
  };
  int failed = 0;
  for (const auto &c : criteria) {
    checks::Result r;
    try {
      r = c.run();
    } catch (const std::exception &e) {
      r.pass = false;
      r.detail = std::string("exception: ") + e.what();
    }
    if (!r.pass) failed++;
    std::printf("%s criterion %d (%s): %s\n", r.pass ? "PASS" : "FAIL", c.id,
                c.name, r.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n",
              static_cast<int>(std::size(criteria)) - failed,
              std::size(criteria));
  return failed ? 1 : 0;
}
