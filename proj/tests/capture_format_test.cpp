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

// Traces as an allocator hook writes them: Alloc/Free only, real addresses,
// untagged blocks as UNK, a metadata header.

#include <doctest.h>

#include <sstream>

#include "memtrace/breakdown.hpp"
#include "memtrace/error.hpp"
#include "memtrace/lifetime.hpp"
#include "memtrace/patterns.hpp"

using namespace memtrace;

namespace {

// A toy two-layer loop: weights tagged, everything else untagged, allocator
// reusing addresses across iterations. The last iteration leaks its output.
std::string hooked_trace(int iterations) {
  std::ostringstream s;
  s << "# device=cpu\n# framework=torch 2.3.0\n# clock_resolution=1us\n";
  std::uint64_t seq = 0, t = 0, id = 1;
  auto line = [&](char kind, std::uint64_t block, std::uint64_t size, std::uint64_t addr, const char* cls) {
    s << seq++ << ',' << t << ',' << kind << ',' << block << ',' << size << ',' << addr << ',' << cls << ",\n";
    t += 3;
  };
  line('A', id, 4096, 0x10000, "PARAM");
  line('A', id + 1, 512, 0x11000, "PARAM");
  id += 2;
  for (int i = 0; i < iterations; ++i) {
    const auto x = id++, h = id++, y = id++;
    line('A', x, 2048, 0x20000, "UNK");
    line('A', h, 8192, 0x21000, "UNK");
    line('A', y, 1024, 0x23000, "UNK");
    line('F', h, 8192, 0x21000, "UNK");
    line('F', x, 2048, 0x20000, "UNK");
    if (i + 1 < iterations) line('F', y, 1024, 0x23000, "UNK");
  }
  return s.str();
}

}  // namespace

TEST_CASE("allocator-hook traces parse and round-trip") {
  const auto text = hooked_trace(3);
  const auto trace = parse_trace(text);
  CHECK(trace.meta().at("framework") == "torch 2.3.0");
  CHECK(write_trace(trace) == text);
  for (const auto& e : trace.events()) {
    CHECK_FALSE(e.is_access());
    CHECK(e.address.has_value());
  }
}

TEST_CASE("leaked blocks are flagged") {
  const auto index = build_block_index(parse_trace(hooked_trace(3)));
  std::vector<std::uint64_t> leaked;
  for (const auto& [id, b] : index.blocks)
    if (b.leaked()) leaked.push_back(id);
  // Two weights plus the final output.
  CHECK(leaked == std::vector<std::uint64_t>{1, 2, 11});

  const auto layout = gantt_layout(index);
  CHECK_FALSE(layout.synthetic);
  for (const auto& row : layout.rows) {
    CHECK(row.leaked == index.blocks.at(row.block_id).leaked());
    // Offsets are relative to the lowest address seen.
    CHECK(row.y_offset_bytes == *index.blocks.at(row.block_id).address - 0x10000);
  }
}

TEST_CASE("untagged blocks are reported as UNK, never guessed") {
  const auto index = build_block_index(parse_trace(hooked_trace(2)));
  const auto r = breakdown_at_peak(index);
  CHECK(r.bytes(ContentClass::Parameter) == 4608);
  CHECK(r.bytes(ContentClass::Unknown) == 2048 + 8192 + 1024);
  CHECK(r.bytes(ContentClass::Intermediate) == 0);
}

TEST_CASE("analysis of Alloc/Free-only traces") {
  const auto index = build_block_index(parse_trace(hooked_trace(4)));
  // No reads or writes: no access intervals unless the boundaries count.
  CHECK(ati_population(compute_atis(index)).empty());
  CHECK_FALSE(ati_population(compute_atis(index, {.include_boundary_gaps = true})).empty());
  // Either a period is found or the dedicated error is raised.
  try {
    const auto s = detect_iterations(parse_trace(hooked_trace(4)));
    CHECK(s.period_len > 0);
  } catch (const NoPeriodFound&) {
  }
}

TEST_CASE("an empty capture session is an empty trace") {
  CHECK_THROWS_AS(parse_trace("# device=cpu\n# framework=torch 2.3.0\n"), EmptyTrace);
}

TEST_CASE("partially addressed traces cannot use address layout") {
  const auto index = build_block_index(parse_trace("0,0,A,1,8,4096,UNK,\n1,1,A,2,8,,UNK,\n"));
  CHECK_THROWS_AS(gantt_layout(index), MixedAddressing);
}
