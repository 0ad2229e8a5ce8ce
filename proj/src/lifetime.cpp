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

#include "memtrace/lifetime.hpp"

#include <algorithm>
#include <queue>
#include <set>
#include <tuple>

#include "memtrace/error.hpp"

namespace memtrace {

namespace {

struct Delta {
  std::uint64_t t;
  std::int64_t bytes;
  std::int64_t blocks;
};

std::vector<const BlockRecord*> in_alloc_order(const BlockIndex& index) {
  std::vector<const BlockRecord*> order;
  order.reserve(index.blocks.size());
  for (const auto& [id, b] : index.blocks) order.push_back(&b);
  std::sort(order.begin(), order.end(), [](const BlockRecord* a, const BlockRecord* b) {
    return std::tie(a->alloc_us, a->alloc_seq) < std::tie(b->alloc_us, b->alloc_seq);
  });
  return order;
}

}  // namespace

std::map<std::uint64_t, AtiSeries> compute_atis(const BlockIndex& index, AtiOptions opts) {
  std::map<std::uint64_t, AtiSeries> out;
  for (const auto& [id, b] : index.blocks) {
    AtiSeries s;
    s.block_id = id;
    s.anchors_us.reserve(b.access_us.size() + 2);
    if (opts.include_boundary_gaps) s.anchors_us.push_back(b.alloc_us);
    s.anchors_us.insert(s.anchors_us.end(), b.access_us.begin(), b.access_us.end());
    if (opts.include_boundary_gaps && b.free_us) s.anchors_us.push_back(*b.free_us);
    if (s.anchors_us.size() >= 2) {
      s.intervals_us.reserve(s.anchors_us.size() - 1);
      for (std::size_t i = 1; i < s.anchors_us.size(); ++i)
        s.intervals_us.push_back(s.anchors_us[i] - s.anchors_us[i - 1]);
    }
    out.emplace_hint(out.end(), id, std::move(s));
  }
  return out;
}

std::vector<std::uint64_t> ati_population(const std::map<std::uint64_t, AtiSeries>& atis) {
  std::vector<std::uint64_t> all;
  for (const auto& [id, s] : atis) all.insert(all.end(), s.intervals_us.begin(), s.intervals_us.end());
  return all;
}

std::vector<TimelinePoint> memory_timeline(const BlockIndex& index) {
  std::vector<Delta> deltas;
  deltas.reserve(index.blocks.size() * 2);
  for (const auto& [id, b] : index.blocks) {
    const auto size = static_cast<std::int64_t>(b.size_bytes);
    deltas.push_back({b.alloc_us, size, 1});
    if (b.free_us) deltas.push_back({*b.free_us, -size, -1});
  }
  std::sort(deltas.begin(), deltas.end(), [](const Delta& a, const Delta& b) { return a.t < b.t; });

  std::vector<TimelinePoint> points;
  std::int64_t bytes = 0;
  std::int64_t blocks = 0;
  for (std::size_t i = 0; i < deltas.size();) {
    const auto t = deltas[i].t;
    for (; i < deltas.size() && deltas[i].t == t; ++i) {
      bytes += deltas[i].bytes;
      blocks += deltas[i].blocks;
    }
    points.push_back({t, static_cast<std::uint64_t>(bytes), static_cast<std::uint64_t>(blocks)});
  }
  return points;
}

Peak peak_memory(std::span<const TimelinePoint> timeline) {
  Peak peak;
  for (const auto& p : timeline) {
    if (p.live_bytes > peak.bytes) peak = {p.live_bytes, p.timestamp_us};
  }
  return peak;
}

Peak peak_memory(const BlockIndex& index) { return peak_memory(memory_timeline(index)); }

GanttLayout gantt_layout(const BlockIndex& index) {
  GanttLayout layout;
  const auto order = in_alloc_order(index);
  layout.rows.reserve(order.size());

  std::size_t addressed = 0;
  std::uint64_t min_address = UINT64_MAX;
  for (const auto* b : order) {
    if (b->address) {
      ++addressed;
      min_address = std::min(min_address, *b->address);
    }
  }
  if (addressed != 0 && addressed != order.size()) throw MixedAddressing();

  auto make_row = [&](const BlockRecord& b) {
    return GanttRow{b.block_id, b.alloc_us, index.lifetime_end(b), b.size_bytes, 0, b.leaked()};
  };

  if (addressed != 0) {
    for (const auto* b : order) {
      auto row = make_row(*b);
      row.y_offset_bytes = *b->address - min_address;
      layout.rows.push_back(row);
    }
    return layout;
  }

  // First-fit. Every previously placed block started no later than the
  // current one, so the blocks that overlap it in time are exactly those
  // still active at its start. Leaked blocks never expire.
  layout.synthetic = true;
  std::set<std::pair<std::uint64_t, std::uint64_t>> active;  // (offset, size)
  using Expiry = std::tuple<std::uint64_t, std::uint64_t, std::uint64_t>;  // (end, offset, size)
  std::priority_queue<Expiry, std::vector<Expiry>, std::greater<>> expiry;

  for (const auto* b : order) {
    auto row = make_row(*b);
    while (!expiry.empty() && std::get<0>(expiry.top()) <= row.start_us) {
      const auto [end, off, size] = expiry.top();
      active.erase(active.find({off, size}));
      expiry.pop();
    }
    std::uint64_t cursor = 0;
    for (const auto& [off, size] : active) {
      if (off >= cursor + row.size_bytes) break;
      cursor = std::max(cursor, off + size);
    }
    row.y_offset_bytes = cursor;

    if (row.leaked) {
      active.insert({cursor, row.size_bytes});
    } else if (row.end_us > row.start_us) {
      active.insert({cursor, row.size_bytes});
      expiry.emplace(row.end_us, cursor, row.size_bytes);
    }
    layout.rows.push_back(row);
  }
  return layout;
}

std::vector<FragmentPoint> fragmentation_timeline(std::span<const GanttRow> rows, const BlockIndex& index) {
  std::vector<std::uint64_t> stamps;
  stamps.reserve(index.blocks.size() * 2);
  for (const auto& [id, b] : index.blocks) {
    stamps.push_back(b.alloc_us);
    if (b.free_us) stamps.push_back(*b.free_us);
  }
  std::sort(stamps.begin(), stamps.end());
  stamps.erase(std::unique(stamps.begin(), stamps.end()), stamps.end());

  std::vector<const GanttRow*> by_start;
  std::vector<const GanttRow*> by_end;
  for (const auto& r : rows) {
    by_start.push_back(&r);
    if (!r.leaked) by_end.push_back(&r);
  }
  std::sort(by_start.begin(), by_start.end(), [](auto* a, auto* b) { return a->start_us < b->start_us; });
  std::sort(by_end.begin(), by_end.end(), [](auto* a, auto* b) { return a->end_us < b->end_us; });

  std::multiset<std::uint64_t> lows;
  std::multiset<std::uint64_t> highs;
  std::uint64_t live_bytes = 0;
  std::size_t si = 0;
  std::size_t ei = 0;

  std::vector<FragmentPoint> out;
  out.reserve(stamps.size());
  for (const auto t : stamps) {
    for (; si < by_start.size() && by_start[si]->start_us <= t; ++si) {
      lows.insert(by_start[si]->y_offset_bytes);
      highs.insert(by_start[si]->y_offset_bytes + by_start[si]->size_bytes);
      live_bytes += by_start[si]->size_bytes;
    }
    for (; ei < by_end.size() && by_end[ei]->end_us <= t; ++ei) {
      lows.erase(lows.find(by_end[ei]->y_offset_bytes));
      highs.erase(highs.find(by_end[ei]->y_offset_bytes + by_end[ei]->size_bytes));
      live_bytes -= by_end[ei]->size_bytes;
    }
    std::uint64_t frag = 0;
    if (lows.size() >= 2) {
      const auto span = *highs.rbegin() - *lows.begin();
      // Overlapping bands (bad address data) would make this negative.
      frag = span > live_bytes ? span - live_bytes : 0;
    }
    out.push_back({t, frag});
  }
  return out;
}

}  // namespace memtrace
