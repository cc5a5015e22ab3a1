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

#ifndef XFSM_METER_H_
#define XFSM_METER_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace xfsm {

class ParsedPacket;

enum class MeterUnit { kPackets, kBytes };

struct MeterBand {
  uint64_t rate;   // units per second
  uint64_t burst;  // bucket depth, units
  uint8_t dscp_remark;
  bool operator==(const MeterBand &) const = default;
};

// Token-bucket meter with one bucket per band. Buckets start full and refill
// continuously in virtual time; a packet exceeds a band when that band's
// bucket holds less than the packet's cost. Arithmetic is exact: credit is
// kept in unit-microseconds.
class Meter {
 public:
  Meter(uint32_t id, std::vector<MeterBand> bands,
        MeterUnit unit = MeterUnit::kPackets);

  uint32_t id() const { return id_; }
  MeterUnit unit() const { return unit_; }
  // Sorted by rate, ascending.
  const std::vector<MeterBand> &bands() const { return bands_; }

  // Index of the highest exceeded band, if any.
  std::optional<std::size_t> measure(std::size_t packet_bytes, uint64_t now);

  // measure() plus the DSCP remark of the highest exceeded band. Non-IP
  // packets are measured but not remarked.
  void apply(ParsedPacket *pkt, uint64_t now);

  uint64_t exceeded(std::size_t band) const { return exceeded_[band]; }
  uint64_t packets() const { return packets_; }

 private:
  struct Bucket {
    uint64_t credit{0};
    uint64_t last{0};
    bool primed{false};
  };

  uint32_t id_;
  MeterUnit unit_;
  std::vector<MeterBand> bands_;
  std::vector<Bucket> buckets_;
  std::vector<uint64_t> exceeded_;
  uint64_t packets_{0};
};

}  // namespace xfsm

#endif  // XFSM_METER_H_
