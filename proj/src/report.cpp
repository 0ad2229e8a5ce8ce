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

#include "memtrace/report.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>
#include <tuple>

#include <json.hpp>

namespace memtrace {

namespace {

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string cell_text(const Cell& cell) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::string>) return csv_escape(v);
        else if constexpr (std::is_same_v<T, bool>) return v ? "true" : "false";
        else if constexpr (std::is_same_v<T, double>) return format_double(v);
        else return std::to_string(v);
      },
      cell);
}

nlohmann::ordered_json cell_json(const Cell& cell) {
  return std::visit([](const auto& v) { return nlohmann::ordered_json(v); }, cell);
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

const char* table_extension(TableFormat format) { return format == TableFormat::Csv ? ".csv" : ".jsonl"; }

void write_table(const Table& table, TableFormat format, std::ostream& out) {
  if (format == TableFormat::Csv) {
    for (std::size_t i = 0; i < table.columns.size(); ++i) out << (i ? "," : "") << table.columns[i];
    out << '\n';
    for (const auto& row : table.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << cell_text(row[i]);
      out << '\n';
    }
    return;
  }
  for (const auto& row : table.rows) {
    nlohmann::ordered_json obj = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < row.size(); ++i) obj[table.columns[i]] = cell_json(row[i]);
    out << obj.dump() << '\n';
  }
}

std::string render_table(const Table& table, TableFormat format) {
  std::ostringstream out;
  write_table(table, format, out);
  return out.str();
}

Table gantt_table(const GanttLayout& layout) {
  Table t{{"block_id", "start_us", "end_us", "size_bytes", "y_offset_bytes", "leaked"}, {}};
  t.rows.reserve(layout.rows.size());
  for (const auto& r : layout.rows)
    t.rows.push_back({r.block_id, r.start_us, r.end_us, r.size_bytes, r.y_offset_bytes, r.leaked});
  return t;
}

Table timeline_table(std::span<const TimelinePoint> timeline, std::span<const FragmentPoint> fragments) {
  Table t{{"timestamp_us", "live_bytes", "live_blocks", "fragment_bytes"}, {}};
  t.rows.reserve(timeline.size());
  for (std::size_t i = 0; i < timeline.size(); ++i) {
    const std::uint64_t frag = i < fragments.size() ? fragments[i].fragment_bytes : 0;
    t.rows.push_back({timeline[i].timestamp_us, timeline[i].live_bytes, timeline[i].live_blocks, frag});
  }
  return t;
}

Table ati_table(const BlockIndex& index, const std::map<std::uint64_t, AtiSeries>& atis) {
  struct Entry {
    std::uint64_t start, block, i, ati;
  };
  std::vector<Entry> entries;
  for (const auto& [id, s] : atis)
    for (std::size_t i = 0; i < s.intervals_us.size(); ++i) entries.push_back({s.anchors_us[i], id, i, s.intervals_us[i]});
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    return std::tie(a.start, a.block, a.i) < std::tie(b.start, b.block, b.i);
  });

  Table t{{"behavior", "block_id", "class", "size_bytes", "interval_index", "gap_start_us", "ati_us"}, {}};
  t.rows.reserve(entries.size());
  std::uint64_t n = 0;
  for (const auto& e : entries) {
    const auto& b = index.blocks.at(e.block);
    t.rows.push_back({n++, e.block, std::string(to_string(b.content_class)), b.size_bytes, e.i, e.start, e.ati});
  }
  return t;
}

Table ecdf_table(std::span<const EcdfPoint> points) {
  Table t{{"ati_us", "cumulative_count", "fraction"}, {}};
  for (const auto& p : points) t.rows.push_back({p.value, p.cumulative_count, p.fraction});
  return t;
}

Table summary_table(const DistributionSummary& s) {
  return {{"count", "min_us", "q1_us", "median_us", "q3_us", "max_us", "mean_us"},
          {{s.count, s.min_us, s.q1_us, s.median_us, s.q3_us, s.max_us, s.mean_us()}}};
}

Table histogram_table(const DistributionSummary& s) {
  Table t{{"bin_lo_us", "bin_hi_us", "count"}, {}};
  for (const auto& b : s.histogram) t.rows.push_back({b.lo_us, b.hi_us, b.count});
  return t;
}

Table swap_table(const SwapPlan& plan) {
  Table t{{"rank", "block_id", "class", "size_bytes", "gap_start_us", "gap_us", "max_swap_bytes", "margin_bytes",
           "feasible", "overlaps_peak"},
          {}};
  std::uint64_t rank = 1;
  for (const auto& c : plan.ranked) {
    t.rows.push_back({rank++, c.block_id, std::string(to_string(c.content_class)), c.size_bytes, c.gap_start_us,
                      c.gap_us, c.max_swap_bytes, c.margin_bytes, c.feasible, c.overlaps_peak});
  }
  return t;
}

Table breakdown_table(std::span<const SweepRow> rows) {
  Table t;
  t.columns.push_back("label");
  for (auto c : kAllClasses) t.columns.push_back(std::string(to_string(c)) + "_bytes");
  for (auto c : kAllClasses) t.columns.push_back(std::string(to_string(c)) + "_share");
  for (const auto& r : rows) {
    std::vector<Cell> row{r.label};
    for (auto c : kAllClasses) row.emplace_back(r.report.bytes(c));
    for (auto c : kAllClasses) row.emplace_back(r.report.share(c));
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::size_t write_iteration_report(const IterationStructure* structure, const StabilityReport* stability,
                                   TableFormat format, std::ostream& out) {
  Table per_iteration{{"iteration", "start_seq", "live_bytes_at_start", "peak_bytes"}, {}};
  if (stability) {
    std::uint64_t k = 0;
    for (const auto& it : stability->iterations)
      per_iteration.rows.push_back({k++, it.start_seq, it.live_bytes_at_start, it.peak_bytes});
  }

  if (format == TableFormat::Csv) {
    if (!structure) {
      out << "status=no_period_found\n";
      return 0;
    }
    out << "status=ok\n"
        << "warmup_len=" << structure->warmup_len << '\n'
        << "period_len=" << structure->period_len << '\n'
        << "iteration_count=" << structure->iteration_count << '\n';
    if (stability) out << "stable=" << (stability->stable ? "true" : "false") << '\n';
    out << '\n';
    write_table(per_iteration, format, out);
    return per_iteration.rows.size();
  }

  nlohmann::ordered_json head = nlohmann::ordered_json::object();
  head["status"] = structure ? "ok" : "no_period_found";
  if (structure) {
    head["warmup_len"] = structure->warmup_len;
    head["period_len"] = structure->period_len;
    head["iteration_count"] = structure->iteration_count;
    if (stability) head["stable"] = stability->stable;
  }
  out << head.dump() << '\n';
  write_table(per_iteration, format, out);
  return per_iteration.rows.size();
}

}  // namespace memtrace
