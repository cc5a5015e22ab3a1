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

#include <gtest/gtest.h>

#include <functional>
#include <random>

#include "checks.h"
#include "error.h"
#include "meter.h"
#include "oracles.h"
#include "program.h"
#include "programs.h"
#include "switch.h"

namespace xfsm {
namespace {

ErrorCode code_of(const std::function<void()> &fn) {
  try {
    fn();
  } catch (const Error &e) {
    return e.code();
  }
  return ErrorCode{0};
}

std::vector<uint8_t> eth(uint64_t src, uint64_t dst) {
  FrameSpec spec;
  spec.eth_src = src;
  spec.eth_dst = dst;
  spec.ipv4 = FrameSpec::Ipv4{};
  return build_frame(spec);
}

StateLabel mac_state(const Switch &sw, uint64_t mac) {
  const auto &b = sw.table(0);
  uint64_t v[1] = {mac};
  return b.states().peek(b.lookup_scope()->make_key(v), 0);
}

class MacPipeline : public ::testing::TestWithParam<bool> { };

TEST_P(MacPipeline, LearnsAndForwards) {
  auto sw = instantiate(programs::mac_learning(4, GetParam()));
  const uint64_t a = 0xa, b = 0xb, c = 0xc;
  auto v1 = sw->submit(eth(a, b), 1, 0);
  EXPECT_EQ(v1.out_ports, (std::vector<uint32_t>{2, 3, 4}));
  EXPECT_EQ(mac_state(*sw, a), 1u);
  auto v2 = sw->submit(eth(b, a), 2, 1);
  EXPECT_EQ(v2.out_ports, std::vector<uint32_t>{1});
  EXPECT_EQ(mac_state(*sw, b), 2u);
  auto v3 = sw->submit(eth(c, a), 3, 2);
  EXPECT_EQ(v3.out_ports, std::vector<uint32_t>{1});
  EXPECT_EQ(mac_state(*sw, c), 3u);
  // a host talking to itself through its own port is not reflected
  auto v4 = sw->submit(eth(b, a), 1, 3);
  EXPECT_TRUE(v4.dropped);
  EXPECT_EQ(v4.table_path, std::vector<uint8_t>{0});
}

TEST_P(MacPipeline, MatchesOracleOnShortRandomTraffic) {
  auto sw = instantiate(programs::mac_learning(3, GetParam()));
  oracle::LearningSwitch ref(3);
  std::mt19937_64 rng(17);
  for (int i = 0; i < 3000; i++) {
    uint64_t src = 1 + rng() % 12, dst = 1 + rng() % 14;
    auto port = static_cast<uint32_t>(1 + rng() % 3);
    auto want = ref.process(src, dst, port);
    auto v = sw->submit(eth(src, dst), port, static_cast<uint64_t>(i));
    ASSERT_EQ(v.out_ports, want) << "packet " << i;
  }
}

INSTANTIATE_TEST_SUITE_P(FullAndParametric, MacPipeline, ::testing::Bool());

TEST(Pipeline, EntryCounts) {
  for (uint32_t n : {2u, 4u, 8u}) {
    EXPECT_EQ(programs::mac_learning(n).tables[0].entries.size(), (n + 1) * n);
    EXPECT_EQ(programs::mac_learning(n, true).tables[0].entries.size(), n + 1);
  }
}

TEST(Pipeline, InvalidInPort) {
  auto sw = instantiate(programs::mac_learning(4));
  EXPECT_EQ(code_of([&] { sw->submit(eth(1, 2), 0, 0); }),
            ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([&] { sw->submit(eth(1, 2), 5, 0); }),
            ErrorCode::kInvalidArgument);
}

TEST(Pipeline, ParseErrorIsDroppedWithReason) {
  auto sw = instantiate(programs::mac_learning(4));
  auto v = sw->submit(std::vector<uint8_t>(6, 0), 1, 0);
  EXPECT_TRUE(v.dropped);
  EXPECT_FALSE(v.reason.empty());
  EXPECT_EQ(sw->counters().parse_errors, 1u);
}

TEST(Pipeline, GotoAndRewritesReachTheWire) {
  Switch sw(3);
  auto &t0 = sw.add_table(0, BlockOptions{false});
  XfsmEntry e0;
  e0.actions = {action::SetField{FieldId::kIpDscp, 9}};
  e0.goto_table = 2;
  t0.install_entry(e0);
  auto &t2 = sw.add_table(2, BlockOptions{false});
  XfsmEntry e2;
  e2.match = {FieldMatch::exact(FieldId::kIpDscp, 9)};
  e2.actions = {action::PushLabel{77}, action::Output{3}};
  t2.install_entry(e2);
  sw.activate();
  auto v = sw.submit(eth(1, 2), 1, 0);
  EXPECT_EQ(v.table_path, (std::vector<uint8_t>{0, 2}));
  EXPECT_EQ(v.out_ports, std::vector<uint32_t>{3});
  EXPECT_EQ(v.dscp, 9);
  auto out = parse(v.bytes, 3);
  EXPECT_EQ(out.get(FieldId::kMplsLabel), 77u);
  EXPECT_EQ(out.get(FieldId::kIpDscp), 9u);
}

TEST(Pipeline, ConfigurationErrors) {
  {
    Switch sw(2);
    auto &t = sw.add_table(0, BlockOptions{false});
    XfsmEntry e;
    e.goto_table = 4;
    t.install_entry(e);
    EXPECT_EQ(code_of([&] { sw.activate(); }), ErrorCode::kUnknownTable);
  }
  {
    Switch sw(2);
    auto &t = sw.add_table(0, BlockOptions{false});
    XfsmEntry e;
    e.actions = {action::Meter{3}};
    t.install_entry(e);
    EXPECT_EQ(code_of([&] { sw.activate(); }), ErrorCode::kUnknownMeter);
  }
  {
    Switch sw(2);
    sw.add_table(0);
    EXPECT_EQ(code_of([&] { sw.add_table(0); }), ErrorCode::kInvalidArgument);
    EXPECT_EQ(code_of([&] { sw.table(9); }), ErrorCode::kUnknownTable);
  }
  EXPECT_EQ(code_of([] { Switch sw(0); }), ErrorCode::kInvalidArgument);
}

TEST(Pipeline, UnknownMeterAtRuntime) {
  Switch sw(2);
  auto pkt = parse(eth(1, 2), 1);
  EXPECT_EQ(code_of([&] { sw.apply_meter(5, &pkt, 0); }),
            ErrorCode::kUnknownMeter);
}

ParsedPacket ip_pkt() { return parse(eth(1, 2), 1); }

TEST(Meter, BurstThenRemark) {
  Meter m(1, {{100, 10, 1}});
  for (int i = 0; i < 10; i++) {
    auto p = ip_pkt();
    m.apply(&p, 5);
    ASSERT_EQ(p.get(FieldId::kIpDscp), 0u) << i;
  }
  auto p = ip_pkt();
  m.apply(&p, 5);
  EXPECT_EQ(p.get(FieldId::kIpDscp), 1u);
  EXPECT_EQ(m.exceeded(0), 1u);
}

TEST(Meter, IdleRefills) {
  Meter m(1, {{100, 10, 1}});
  auto p = ip_pkt();
  m.apply(&p, 100'000'000);
  EXPECT_EQ(p.get(FieldId::kIpDscp), 0u);
  for (int i = 0; i < 20; i++) {
    auto q = ip_pkt();
    m.apply(&q, 100'000'001);
  }
  auto r = ip_pkt();
  m.apply(&r, 200'000'000);
  EXPECT_EQ(r.get(FieldId::kIpDscp), 0u);
}

TEST(Meter, HighestExceededBandWins) {
  Meter m(1, {{400, 5, 2}, {100, 5, 1}});
  EXPECT_EQ(m.bands()[0].rate, 100u);
  for (int i = 0; i < 5; i++) {
    auto p = ip_pkt();
    m.apply(&p, 0);
  }
  auto p = ip_pkt();
  m.apply(&p, 0);
  EXPECT_EQ(p.get(FieldId::kIpDscp), 2u);
}

TEST(Meter, OnlyLowBandExceeded) {
  Meter m(1, {{100, 2, 1}, {1000, 4, 2}});
  uint8_t last = 0;
  for (int i = 0; i < 3; i++) {
    auto p = ip_pkt();
    m.apply(&p, 0);
    last = static_cast<uint8_t>(*p.get(FieldId::kIpDscp));
  }
  EXPECT_EQ(last, 1);
}

TEST(Meter, RefillRateIsExact) {
  // 100 pps, depth 1: one packet every 10 ms conforms, 9999 us does not
  Meter m(1, {{100, 1, 1}});
  EXPECT_FALSE(m.measure(64, 0).has_value());
  EXPECT_TRUE(m.measure(64, 9'999).has_value());
  EXPECT_FALSE(m.measure(64, 20'000).has_value());
  EXPECT_FALSE(m.measure(64, 30'000).has_value());
}

TEST(Meter, ByteUnit) {
  Meter m(1, {{1000, 100, 3}}, MeterUnit::kBytes);
  EXPECT_FALSE(m.measure(60, 0).has_value());
  EXPECT_TRUE(m.measure(60, 0).has_value());
}

TEST(Meter, Validation) {
  EXPECT_EQ(code_of([] { Meter m(1, {}); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([] { Meter m(1, {{1, 0, 1}}); }),
            ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([] { Meter m(1, {{1, 1, 64}}); }),
            ErrorCode::kValueOverflow);
}

// Token bucket bound: over [t0, t1] at most rate*(t1-t0) + burst packets
// conform, plus one for the fractional token.
TEST(Meter, Conservation) {
  std::mt19937_64 rng(21);
  for (int round = 0; round < 200; round++) {
    uint64_t rate = 1 + rng() % 1000, burst = 1 + rng() % 20;
    Meter m(1, {{rate, burst, 1}});
    std::vector<std::pair<uint64_t, bool>> log;
    uint64_t t = rng() % 1000;
    for (int i = 0; i < 400; i++) {
      t += rng() % 3 ? rng() % 2000 : 0;
      log.push_back({t, m.measure(64, t).has_value()});
    }
    for (int q = 0; q < 50; q++) {
      std::size_t i = rng() % log.size(), j = rng() % log.size();
      if (i > j) std::swap(i, j);
      uint64_t arrivals = j - i + 1, remarked = 0;
      for (std::size_t k = i; k <= j; k++) remarked += log[k].second;
      double span = static_cast<double>(log[j].first - log[i].first) / 1e6;
      double allowance = static_cast<double>(rate) * span +
                         static_cast<double>(burst) + 1.0;
      ASSERT_LE(static_cast<double>(arrivals - remarked), allowance)
          << "rate " << rate << " burst " << burst;
    }
  }
}

TEST(Ddos, NewFlowWithoutAttackIsGreen) {
  programs::DdosConfig cfg;
  cfg.destinations = {0x0a000064};
  auto sw = instantiate(programs::ddos_mitigation(cfg));
  FrameSpec spec;
  spec.ipv4 = FrameSpec::Ipv4{};
  spec.ipv4->src = 0x01010101;
  spec.ipv4->dst = 0x0a000064;
  spec.tcp = FrameSpec::Tcp{};
  auto v = sw->submit(build_frame(spec), 1, 0);
  EXPECT_EQ(v.out_ports, std::vector<uint32_t>{2});
  EXPECT_EQ(v.table_path, (std::vector<uint8_t>{0, 1}));
  auto &t1 = sw->table(1);
  uint64_t key[2] = {0x01010101, 0x0a000064};
  EXPECT_EQ(t1.states().peek(t1.lookup_scope()->make_key(key), 0),
            programs::ddos::kGreen);
}

TEST(Ddos, UnmonitoredTrafficBypasses) {
  programs::DdosConfig cfg;
  cfg.destinations = {0x0a000064};
  auto sw = instantiate(programs::ddos_mitigation(cfg));
  auto v = sw->submit(eth(1, 2), 1, 0);
  EXPECT_EQ(v.out_ports, std::vector<uint32_t>{2});
  EXPECT_EQ(v.table_path, std::vector<uint8_t>{0});
}

TEST(Ddos, ScriptedScenario) {
  auto r = checks::ddos_scenario();
  EXPECT_TRUE(r.pass) << r.detail;
}

}  // namespace
}  // namespace xfsm
