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

// Plot-data tables. Every analysis result can be rendered as CSV with a
// header row or as JSON lines (one object per row, keys in column order).

#pragma once

#include <cstdint>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "memtrace/breakdown.hpp"
#include "memtrace/lifetime.hpp"
#include "memtrace/patterns.hpp"
#include "memtrace/stats.hpp"
#include "memtrace/swap.hpp"

namespace memtrace {

enum class TableFormat { Csv, JsonLines };

using Cell = std::variant<std::uint64_t, std::int64_t, double, bool, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

/// Shortest round-trip decimal form; deterministic across platforms.
std::string format_double(double v);

void write_table(const Table& table, TableFormat format, std::ostream& out);
std::string render_table(const Table& table, TableFormat format);
const char* table_extension(TableFormat format);

Table gantt_table(const GanttLayout& layout);
Table timeline_table(std::span<const TimelinePoint> timeline, std::span<const FragmentPoint> fragments);
/// One row per interval, ordered by gap start then block_id.
Table ati_table(const BlockIndex& index, const std::map<std::uint64_t, AtiSeries>& atis);
Table ecdf_table(std::span<const EcdfPoint> points);
Table summary_table(const DistributionSummary& summary);
Table histogram_table(const DistributionSummary& summary);
Table swap_table(const SwapPlan& plan);
/// label, IN/PARAM/INTER/OTHER/UNK bytes, then the same five shares.
Table breakdown_table(std::span<const SweepRow> rows);

/// Iteration report: key=value header lines then a per-iteration CSV table
/// (Csv), or one summary object followed by one object per iteration
/// (JsonLines). Returns the number of per-iteration rows.
std::size_t write_iteration_report(const IterationStructure* structure, const StabilityReport* stability,
                                   TableFormat format, std::ostream& out);

}  // namespace memtrace
