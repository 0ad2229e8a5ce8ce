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

#include "memtrace/swap.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <tuple>

#include "memtrace/error.hpp"

namespace memtrace {

namespace {

constexpr double kUsPerSecond = 1e6;

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

void BandwidthConfig::check() const {
  if (!(std::isfinite(b_d2h) && b_d2h > 0.0)) throw ConfigError("b_d2h must be positive");
  if (!(std::isfinite(b_h2d) && b_h2d > 0.0)) throw ConfigError("b_h2d must be positive");
}

BandwidthConfig parse_bandwidth_config(const std::string& text, BandwidthConfig base) {
  std::istringstream in(text);
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("bandwidth config line " + std::to_string(line_no) + ": expected key=value");
    const auto key = trim(std::string_view(line).substr(0, eq));
    const auto value = trim(std::string_view(line).substr(eq + 1));
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc() || ptr != value.data() + value.size())
      throw ConfigError("bandwidth config line " + std::to_string(line_no) + ": bad number '" + value + "'");
    if (key == "b_d2h_bytes_per_s") {
      base.b_d2h = v;
    } else if (key == "b_h2d_bytes_per_s") {
      base.b_h2d = v;
    } else {
      throw ConfigError("bandwidth config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
  }
  base.check();
  return base;
}

BandwidthConfig read_bandwidth_config(const std::string& path, BandwidthConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_bandwidth_config(ss.str(), base);
}

double max_swap_size(std::uint64_t gap_us, const BandwidthConfig& bw) {
  // T * (a*b) / (a+b) keeps the result symmetric in (a, b) and exactly
  // homogeneous under power-of-two scaling.
  return static_cast<double>(gap_us) * (bw.b_d2h * bw.b_h2d) / (bw.b_d2h + bw.b_h2d) / kUsPerSecond;
}

std::uint64_t min_hiding_interval(std::uint64_t size_bytes, const BandwidthConfig& bw) {
  if (size_bytes == 0) return 0;
  const double size = static_cast<double>(size_bytes);
  const double estimate = size * kUsPerSecond * (bw.b_d2h + bw.b_h2d) / (bw.b_d2h * bw.b_h2d);
  auto t = static_cast<std::uint64_t>(std::ceil(estimate));
  // Settle on the forward formula so feasibility at the returned gap holds.
  while (t > 0 && max_swap_size(t - 1, bw) >= size) --t;
  while (max_swap_size(t, bw) < size) ++t;
  return t;
}

std::vector<SwapCandidate> find_candidates(const BlockIndex& index,
                                           const std::map<std::uint64_t, AtiSeries>& atis,
                                           const BandwidthConfig& bw,
                                           std::optional<TimeWindow> peak_window) {
  if (!peak_window) {
    const auto peak = peak_memory(index);
    peak_window = TimeWindow{peak.timestamp_us, peak.timestamp_us};
  }

  std::vector<SwapCandidate> out;
  for (const auto& [id, series] : atis) {
    if (series.intervals_us.empty()) continue;
    const auto& block = index.blocks.at(id);
    const auto best = std::max_element(series.intervals_us.begin(), series.intervals_us.end());
    const auto i = static_cast<std::size_t>(best - series.intervals_us.begin());

    SwapCandidate c;
    c.block_id = id;
    c.size_bytes = block.size_bytes;
    c.content_class = block.content_class;
    c.gap_start_us = series.anchors_us[i];
    c.gap_us = *best;
    c.max_swap_bytes = max_swap_size(c.gap_us, bw);
    c.feasible = static_cast<double>(c.size_bytes) <= c.max_swap_bytes;
    const double floor_max = std::floor(std::min(c.max_swap_bytes, 9.0e18));
    c.margin_bytes = static_cast<std::int64_t>(floor_max) - static_cast<std::int64_t>(c.size_bytes);
    c.overlaps_peak = c.gap_us > 0 && c.gap_start_us <= peak_window->hi_us &&
                      c.gap_start_us + c.gap_us > peak_window->lo_us;
    out.push_back(c);
  }
  return out;
}

SwapPlan rank_candidates(std::vector<SwapCandidate> candidates) {
  std::sort(candidates.begin(), candidates.end(), [](const SwapCandidate& a, const SwapCandidate& b) {
    if (a.feasible != b.feasible) return a.feasible;
    if (a.feasible) {
      return std::make_tuple(a.overlaps_peak, a.size_bytes, a.margin_bytes, b.block_id) >
             std::make_tuple(b.overlaps_peak, b.size_bytes, b.margin_bytes, a.block_id);
    }
    return std::make_tuple(a.size_bytes, b.block_id) > std::make_tuple(b.size_bytes, a.block_id);
  });
  SwapPlan plan;
  for (const auto& c : candidates)
    if (c.feasible && c.overlaps_peak) plan.estimated_savings_bytes += c.size_bytes;
  plan.ranked = std::move(candidates);
  return plan;
}

}  // namespace memtrace
