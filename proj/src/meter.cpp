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

#include "meter.h"

#include <algorithm>
#include <string>

#include "error.h"
#include "packet.h"

namespace xfsm {

namespace {
constexpr uint64_t kUsPerSec = 1000000;
}

Meter::Meter(uint32_t id, std::vector<MeterBand> bands, MeterUnit unit)
    : id_(id), unit_(unit), bands_(std::move(bands)) {
  if (bands_.empty())
    throw Error(ErrorCode::kInvalidArgument,
                "meter " + std::to_string(id) + " has no bands");
  for (const auto &b : bands_) {
    if (b.burst == 0)
      throw Error(ErrorCode::kInvalidArgument,
                  "meter " + std::to_string(id) + " band burst must be > 0");
    if (b.dscp_remark > 63)
      throw Error(ErrorCode::kValueOverflow,
                  "DSCP remark " + std::to_string(b.dscp_remark) +
                      " exceeds 6 bits");
    if (b.burst > ~uint64_t{0} / kUsPerSec)
      throw Error(ErrorCode::kInvalidArgument, "band burst too large");
  }
  std::stable_sort(bands_.begin(), bands_.end(),
                   [](const MeterBand &a, const MeterBand &b) {
                     return a.rate < b.rate;
                   });
  buckets_.resize(bands_.size());
  exceeded_.resize(bands_.size());
}

std::optional<std::size_t> Meter::measure(std::size_t packet_bytes,
                                          uint64_t now) {
  packets_++;
  uint64_t cost =
      (unit_ == MeterUnit::kPackets ? 1 : packet_bytes) * kUsPerSec;
  std::optional<std::size_t> highest;
  for (std::size_t i = 0; i < bands_.size(); i++) {
    const auto &band = bands_[i];
    auto &bucket = buckets_[i];
    uint64_t cap = band.burst * kUsPerSec;
    if (!bucket.primed) {
      bucket.credit = cap;
      bucket.last = now;
      bucket.primed = true;
    } else if (now > bucket.last) {
      uint64_t dt = now - bucket.last;
      uint64_t room = cap - bucket.credit;
      if (band.rate != 0 && dt >= room / band.rate + 1)
        bucket.credit = cap;
      else
        bucket.credit += band.rate * dt;
      bucket.credit = std::min(bucket.credit, cap);
      bucket.last = now;
    }
    if (bucket.credit >= cost) {
      bucket.credit -= cost;
    } else {
      exceeded_[i]++;
      highest = i;
    }
  }
  return highest;
}

void Meter::apply(ParsedPacket *pkt, uint64_t now) {
  auto band = measure(pkt->bytes().size(), now);
  if (band && pkt->has(FieldId::kIpDscp))
    pkt->set(FieldId::kIpDscp, bands_[*band].dscp_remark);
}

}  // namespace xfsm
