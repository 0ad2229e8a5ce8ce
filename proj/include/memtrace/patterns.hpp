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

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "memtrace/trace.hpp"

namespace memtrace {

/// What an event looks like with time and identity stripped off.
struct EventToken {
  EventKind kind = EventKind::Alloc;
  std::uint64_t size_bytes = 0;
  ContentClass content_class = ContentClass::Unknown;
  friend bool operator==(const EventToken&, const EventToken&) = default;
};

std::vector<EventToken> tokenize(const Trace& trace);

struct IterationStructure {
  std::size_t warmup_len = 0;
  std::size_t period_len = 0;
  std::size_t iteration_count = 0;
  /// Start of each full iteration. Token positions from the token overload
  /// of detect_iterations, seq values from the Trace overload.
  std::vector<std::uint64_t> boundaries;
  /// Position/seq just past the last full iteration; absent when the last
  /// full iteration runs to the end of the input.
  std::optional<std::uint64_t> end;
};

/// Finds the smallest period p (then the smallest warm-up w) such that
/// tokens[w:] repeats with period p at least twice, allowing a truncated
/// final repetition. Without `max_warmup` the warm-up may be at most one
/// candidate period long. Throws NoPeriodFound.
IterationStructure detect_iterations(std::span<const EventToken> tokens,
                                     std::optional<std::size_t> max_warmup = std::nullopt);
IterationStructure detect_iterations(const Trace& trace, std::optional<std::size_t> max_warmup = std::nullopt);

struct IterationStats {
  std::uint64_t start_seq = 0;
  std::uint64_t live_bytes_at_start = 0;
  std::uint64_t peak_bytes = 0;
};

struct StabilityReport {
  std::vector<IterationStats> iterations;
  /// All per-iteration peaks equal. Vacuously true for fewer than two.
  bool stable = true;
};

/// `structure` must come from the Trace overload (seq boundaries).
StabilityReport iteration_stability(const IterationStructure& structure, const BlockIndex& index);

}  // namespace memtrace
