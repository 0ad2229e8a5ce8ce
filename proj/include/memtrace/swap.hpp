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

// Swap feasibility.
//
// A block of S bytes can be copied out to the host and back within an idle
// gap of T seconds, without stalling the next access, when
//
//   S / B_d2h + S / B_h2d <= T,   i.e.   S <= T / (1/B_d2h + 1/B_h2d).
//
// Units are decimal SI: 1 GB/s = 1e9 bytes/s, 1 KB = 1e3 bytes.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "memtrace/lifetime.hpp"
#include "memtrace/trace.hpp"

namespace memtrace {

struct BandwidthConfig {
  double b_d2h = 6.4e9;  // bytes/s
  double b_h2d = 6.3e9;  // bytes/s

  /// Throws ConfigError unless both are finite and strictly positive.
  void check() const;
};

/// Reads `b_d2h_bytes_per_s` / `b_h2d_bytes_per_s` from key=value text,
/// starting from `base`. Blank lines and '#' comments are ignored.
BandwidthConfig parse_bandwidth_config(const std::string& text, BandwidthConfig base = {});
BandwidthConfig read_bandwidth_config(const std::string& path, BandwidthConfig base = {});

/// Largest swappable size in bytes for an idle gap of `gap_us`.
double max_swap_size(std::uint64_t gap_us, const BandwidthConfig& bw);

/// Smallest integer gap in microseconds with max_swap_size(gap) >= size.
std::uint64_t min_hiding_interval(std::uint64_t size_bytes, const BandwidthConfig& bw);

struct SwapCandidate {
  std::uint64_t block_id = 0;
  std::uint64_t size_bytes = 0;
  ContentClass content_class = ContentClass::Unknown;
  std::uint64_t gap_start_us = 0;
  std::uint64_t gap_us = 0;
  double max_swap_bytes = 0.0;
  bool feasible = false;
  /// floor(max_swap_bytes) - size_bytes; >= 0 exactly when feasible.
  std::int64_t margin_bytes = 0;
  bool overlaps_peak = false;
};

/// Closed time window [lo_us, hi_us].
struct TimeWindow {
  std::uint64_t lo_us = 0;
  std::uint64_t hi_us = 0;
};

/// One candidate per block with at least one ATI, taken at the block's
/// largest gap (earliest on ties). A gap [start, start + T) overlaps the
/// window when start <= hi and start + T > lo. The window defaults to the
/// peak-memory instant.
std::vector<SwapCandidate> find_candidates(const BlockIndex& index,
                                           const std::map<std::uint64_t, AtiSeries>& atis,
                                           const BandwidthConfig& bw,
                                           std::optional<TimeWindow> peak_window = std::nullopt);

struct SwapPlan {
  std::vector<SwapCandidate> ranked;
  /// Sum of sizes of feasible candidates whose gap overlaps the peak.
  std::uint64_t estimated_savings_bytes = 0;
};

/// Feasible first by (overlaps_peak, size, margin) descending, then
/// infeasible by size descending. block_id breaks remaining ties.
SwapPlan rank_candidates(std::vector<SwapCandidate> candidates);

}  // namespace memtrace
