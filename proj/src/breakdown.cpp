// Copyright 2026 The memtrace Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "memtrace/breakdown.hpp"

#include <future>

#include "memtrace/error.hpp"
#include "memtrace/lifetime.hpp"

namespace memtrace {

BreakdownReport breakdown_at(const BlockIndex& index, std::uint64_t timestamp_us) {
  BreakdownReport r;
  r.at_timestamp_us = timestamp_us;
  for (const auto& [id, b] : index.blocks) {
    if (!b.live_at(timestamp_us)) continue;
    r.bytes_per_class[class_index(b.content_class)] += b.size_bytes;
    r.total_bytes += b.size_bytes;
  }
  if (r.total_bytes == 0) throw NoLiveBlocks(timestamp_us);
  return r;
}

BreakdownReport breakdown_at_peak(const BlockIndex& index) {
  return breakdown_at(index, peak_memory(index).timestamp_us);
}

std::vector<SweepRow> sweep_report(const std::vector<std::pair<std::string, Trace>>& traces,
                                   std::optional<std::uint64_t> at_us) {
  std::vector<std::future<BreakdownReport>> pending;
  pending.reserve(traces.size());
  for (const auto& [label, trace] : traces) {
    pending.push_back(std::async(std::launch::async, [&trace = trace, at_us] {
      const auto index = build_block_index(trace);
      return at_us ? breakdown_at(index, *at_us) : breakdown_at_peak(index);
    }));
  }
  std::vector<SweepRow> rows;
  rows.reserve(traces.size());
  for (std::size_t i = 0; i < traces.size(); ++i) {
    try {
      rows.push_back({traces[i].first, pending[i].get()});
    } catch (const std::exception& e) {
      throw Error(traces[i].first + ": " + e.what());
    }
  }
  return rows;
}

}  // namespace memtrace
