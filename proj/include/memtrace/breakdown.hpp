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

#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "memtrace/trace.hpp"

namespace memtrace {

/// Live bytes per content class at one instant.
struct BreakdownReport {
  std::uint64_t at_timestamp_us = 0;
  std::array<std::uint64_t, kNumClasses> bytes_per_class{};
  std::uint64_t total_bytes = 0;

  std::uint64_t bytes(ContentClass c) const { return bytes_per_class[class_index(c)]; }
  double share(ContentClass c) const {
    return total_bytes == 0 ? 0.0 : static_cast<double>(bytes(c)) / static_cast<double>(total_bytes);
  }
};

/// Throws NoLiveBlocks when nothing is live at `timestamp_us`.
BreakdownReport breakdown_at(const BlockIndex& index, std::uint64_t timestamp_us);
BreakdownReport breakdown_at_peak(const BlockIndex& index);

struct SweepRow {
  std::string label;
  BreakdownReport report;
};

/// One row per input, in input order, each at its own peak (or at
/// `at_us` when given). Errors are rethrown as Error prefixed with the label.
std::vector<SweepRow> sweep_report(const std::vector<std::pair<std::string, Trace>>& traces,
                                   std::optional<std::uint64_t> at_us = std::nullopt);

}  // namespace memtrace
