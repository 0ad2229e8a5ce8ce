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

#include "memtrace/patterns.hpp"

#include <algorithm>

#include "memtrace/error.hpp"

namespace memtrace {

namespace {

// z[i] = length of the longest common prefix of s and s[i:].
std::vector<std::size_t> z_function(const std::vector<EventToken>& s) {
  const std::size_t n = s.size();
  std::vector<std::size_t> z(n, 0);
  if (n == 0) return z;
  z[0] = n;
  std::size_t l = 0, r = 0;
  for (std::size_t i = 1; i < n; ++i) {
    if (i < r) z[i] = std::min(r - i, z[i - l]);
    while (i + z[i] < n && s[z[i]] == s[i + z[i]]) ++z[i];
    if (i + z[i] > r) {
      l = i;
      r = i + z[i];
    }
  }
  return z;
}

}  // namespace

std::vector<EventToken> tokenize(const Trace& trace) {
  std::vector<EventToken> tokens;
  tokens.reserve(trace.size());
  for (const auto& e : trace.events()) tokens.push_back({e.kind, e.size_bytes, e.content_class});
  return tokens;
}

IterationStructure detect_iterations(std::span<const EventToken> tokens, std::optional<std::size_t> max_warmup) {
  const std::size_t n = tokens.size();
  if (n < 2) throw NoPeriodFound();

  // tokens[w:] has period p  <=>  reversed[j] == reversed[j + p] for
  // j < n - w - p, i.e. z[p] >= n - w - p on the reversed sequence. The
  // smallest admissible warm-up for p is therefore n - p - z[p].
  std::vector<EventToken> reversed(tokens.rbegin(), tokens.rend());
  const auto z = z_function(reversed);

  for (std::size_t p = 1; 2 * p <= n; ++p) {
    const std::size_t w = n - p - z[p];
    const std::size_t limit = max_warmup.value_or(p);
    if (w > limit || n - w < 2 * p) continue;

    IterationStructure s;
    s.warmup_len = w;
    s.period_len = p;
    s.iteration_count = (n - w) / p;
    for (std::size_t k = 0; k < s.iteration_count; ++k) s.boundaries.push_back(w + k * p);
    const std::size_t past = w + s.iteration_count * p;
    if (past < n) s.end = past;
    return s;
  }
  throw NoPeriodFound();
}

IterationStructure detect_iterations(const Trace& trace, std::optional<std::size_t> max_warmup) {
  const auto tokens = tokenize(trace);
  auto s = detect_iterations(std::span<const EventToken>(tokens), max_warmup);
  const auto& events = trace.events();
  for (auto& b : s.boundaries) b = events[b].seq;
  if (s.end) s.end = events[*s.end].seq;
  return s;
}

StabilityReport iteration_stability(const IterationStructure& structure, const BlockIndex& index) {
  struct Step {
    std::uint64_t seq;
    std::int64_t bytes;
  };
  std::vector<Step> steps;
  steps.reserve(index.blocks.size() * 2);
  for (const auto& [id, b] : index.blocks) {
    steps.push_back({b.alloc_seq, static_cast<std::int64_t>(b.size_bytes)});
    if (b.free_seq) steps.push_back({*b.free_seq, -static_cast<std::int64_t>(b.size_bytes)});
  }
  std::sort(steps.begin(), steps.end(), [](const Step& a, const Step& b) { return a.seq < b.seq; });

  StabilityReport report;
  std::int64_t live = 0;
  std::size_t i = 0;
  for (std::size_t k = 0; k < structure.boundaries.size(); ++k) {
    const auto start = structure.boundaries[k];
    const std::optional<std::uint64_t> stop =
        k + 1 < structure.boundaries.size() ? std::optional<std::uint64_t>(structure.boundaries[k + 1]) : structure.end;
    for (; i < steps.size() && steps[i].seq < start; ++i) live += steps[i].bytes;

    IterationStats it{start, static_cast<std::uint64_t>(live), static_cast<std::uint64_t>(live)};
    for (; i < steps.size() && (!stop || steps[i].seq < *stop); ++i) {
      live += steps[i].bytes;
      it.peak_bytes = std::max(it.peak_bytes, static_cast<std::uint64_t>(live));
    }
    report.iterations.push_back(it);
  }
  for (const auto& it : report.iterations)
    if (it.peak_bytes != report.iterations.front().peak_bytes) report.stable = false;
  return report;
}

}  // namespace memtrace
