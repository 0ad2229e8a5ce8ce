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

#include "support/oracles.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <set>

namespace memtrace::testing {

Trace random_trace(std::mt19937_64& rng, const RandomTraceOptions& opts) {
  std::vector<MemoryEvent> events;
  struct Live {
    std::uint64_t size;
    ContentClass cls;
    std::optional<std::uint64_t> address;
  };
  std::map<std::uint64_t, Live> live;
  std::uint64_t t = 0;
  std::uint64_t next_id = 1;
  std::uint64_t next_address = 0x10000;
  std::uniform_int_distribution<std::uint64_t> step(0, opts.max_step_us);
  std::uniform_int_distribution<std::uint64_t> size(1, opts.max_size);
  std::uniform_int_distribution<int> cls(0, static_cast<int>(kNumClasses) - 1);
  std::uniform_int_distribution<int> action(0, 9);

  const auto n = std::uniform_int_distribution<std::size_t>(1, opts.max_events)(rng);
  while (events.size() < n) {
    t += step(rng);
    MemoryEvent e;
    e.seq = events.size();
    e.timestamp_us = t;
    const int a = action(rng);
    if (live.empty() || a < 4) {
      e.kind = EventKind::Alloc;
      e.block_id = next_id++;
      e.size_bytes = size(rng);
      e.content_class = static_cast<ContentClass>(cls(rng));
      if (opts.with_addresses) {
        e.address = next_address;
        next_address += e.size_bytes + 16 * (e.size_bytes % 3);
      }
      live[e.block_id] = {e.size_bytes, e.content_class, e.address};
    } else {
      auto it = live.begin();
      std::advance(it, std::uniform_int_distribution<std::size_t>(0, live.size() - 1)(rng));
      e.block_id = it->first;
      e.size_bytes = it->second.size;
      e.content_class = it->second.cls;
      e.kind = a < 7 ? EventKind::Read : a < 9 ? EventKind::Write : EventKind::Free;
      if (opts.with_addresses && a % 2 == 0) e.address = it->second.address;
      if (e.kind == EventKind::Free) live.erase(it);
    }
    if (a == 3) e.iteration_hint = t / 10;
    events.push_back(e);
  }
  return Trace(std::move(events), {{"source", "random"}});
}

std::vector<TimelinePoint> brute_timeline(const Trace& trace) {
  struct Span {
    std::uint64_t alloc;
    std::optional<std::uint64_t> free;
    std::uint64_t size;
  };
  std::map<std::uint64_t, Span> spans;
  std::set<std::uint64_t> stamps;
  for (const auto& e : trace.events()) {
    if (e.kind == EventKind::Alloc) {
      spans[e.block_id] = {e.timestamp_us, std::nullopt, e.size_bytes};
      stamps.insert(e.timestamp_us);
    } else if (e.kind == EventKind::Free) {
      spans[e.block_id].free = e.timestamp_us;
      stamps.insert(e.timestamp_us);
    }
  }
  std::vector<TimelinePoint> out;
  for (auto t : stamps) {
    TimelinePoint p{t, 0, 0};
    for (const auto& [id, s] : spans) {
      if (s.alloc <= t && (!s.free || t < *s.free)) {
        p.live_bytes += s.size;
        p.live_blocks += 1;
      }
    }
    out.push_back(p);
  }
  return out;
}

std::uint64_t brute_percentile(const std::vector<std::uint64_t>& values, std::uint64_t num, std::uint64_t den) {
  const std::uint64_t n = values.size();
  const std::uint64_t rank = std::max<std::uint64_t>(1, (num * n + den - 1) / den);
  std::optional<std::uint64_t> best;
  for (auto v : values) {
    std::uint64_t at_most = 0;
    for (auto w : values) at_most += w <= v ? 1 : 0;
    if (at_most >= rank && (!best || v < *best)) best = v;
  }
  return *best;
}

MlpConfig random_mlp_config(std::mt19937_64& rng) {
  auto pick = [&](std::uint64_t lo, std::uint64_t hi) { return std::uniform_int_distribution<std::uint64_t>(lo, hi)(rng); };
  MlpConfig c;
  c.d_in = pick(1, 16);
  c.d_hidden = pick(1, 4096);
  c.d_out = pick(1, 16);
  c.batch = pick(1, 2048);
  c.iterations = pick(1, 8);
  c.element_bytes = std::array<std::uint64_t, 3>{2, 4, 8}[pick(0, 2)];
  c.bytes_per_us = pick(1, 100000);
  return c;
}

}  // namespace memtrace::testing
