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

// Lifetimes, access time intervals (ATIs), the live-memory timeline and the
// Gantt layout built from a BlockIndex.

#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "memtrace/trace.hpp"

namespace memtrace {

/// Gaps between consecutive accesses of one block.
///
/// `anchors_us` holds the timestamps the gaps are taken between, so interval
/// i spans [anchors_us[i], anchors_us[i + 1]).
struct AtiSeries {
  std::uint64_t block_id = 0;
  std::vector<std::uint64_t> anchors_us;
  std::vector<std::uint64_t> intervals_us;
};

struct AtiOptions {
  /// Also count the Alloc -> first access and last access -> Free gaps.
  bool include_boundary_gaps = false;
};

std::map<std::uint64_t, AtiSeries> compute_atis(const BlockIndex& index, AtiOptions opts = {});

/// Every interval of every block, in block_id order.
std::vector<std::uint64_t> ati_population(const std::map<std::uint64_t, AtiSeries>& atis);

struct TimelinePoint {
  std::uint64_t timestamp_us = 0;
  std::uint64_t live_bytes = 0;
  std::uint64_t live_blocks = 0;
  friend bool operator==(const TimelinePoint&, const TimelinePoint&) = default;
};

/// One point per distinct Alloc/Free timestamp, reflecting all events at
/// that timestamp. A block freed at t is not live at t.
std::vector<TimelinePoint> memory_timeline(const BlockIndex& index);

struct Peak {
  std::uint64_t bytes = 0;
  std::uint64_t timestamp_us = 0;
  friend bool operator==(const Peak&, const Peak&) = default;
};

/// Maximum live bytes, earliest timestamp on ties. (0, 0) for no blocks.
Peak peak_memory(const BlockIndex& index);
Peak peak_memory(std::span<const TimelinePoint> timeline);

struct GanttRow {
  std::uint64_t block_id = 0;
  std::uint64_t start_us = 0;
  std::uint64_t end_us = 0;
  std::uint64_t size_bytes = 0;
  std::uint64_t y_offset_bytes = 0;
  bool leaked = false;
  friend bool operator==(const GanttRow&, const GanttRow&) = default;
};

struct GanttLayout {
  /// Rows in allocation order.
  std::vector<GanttRow> rows;
  /// True when offsets came from first-fit placement rather than addresses.
  bool synthetic = false;
};

/// Uses device addresses when every block has one, otherwise places blocks
/// first-fit in allocation order. Throws MixedAddressing when only some
/// blocks are addressed.
GanttLayout gantt_layout(const BlockIndex& index);

struct FragmentPoint {
  std::uint64_t timestamp_us = 0;
  std::uint64_t fragment_bytes = 0;
  friend bool operator==(const FragmentPoint&, const FragmentPoint&) = default;
};

/// Unoccupied bytes between the lowest and highest live band at every
/// Alloc/Free timestamp.
std::vector<FragmentPoint> fragmentation_timeline(std::span<const GanttRow> rows, const BlockIndex& index);

}  // namespace memtrace
