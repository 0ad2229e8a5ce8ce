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

// Test-only reference implementations and random input generators. None of
// this goes through the library's analysis code: the oracles read raw events
// and recompute everything by brute force.

#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "memtrace/lifetime.hpp"
#include "memtrace/synthgen.hpp"
#include "memtrace/trace.hpp"

namespace memtrace::testing {

struct RandomTraceOptions {
  std::size_t max_events = 1000;
  std::uint64_t max_size = 4096;
  std::uint64_t max_step_us = 3;  // 0 allowed, so timestamps tie
  bool with_addresses = false;
};

/// A valid trace of at most `max_events` events with random allocs,
/// accesses, frees and some blocks left alive.
Trace random_trace(std::mt19937_64& rng, const RandomTraceOptions& opts = {});

/// live bytes/blocks at each distinct Alloc/Free timestamp, by scanning
/// every block at every point.
std::vector<TimelinePoint> brute_timeline(const Trace& trace);

/// Nearest-rank percentile with p = num/den, by counting for each sample.
std::uint64_t brute_percentile(const std::vector<std::uint64_t>& values, std::uint64_t num, std::uint64_t den);

/// Random MLP configuration small enough for quick tests.
MlpConfig random_mlp_config(std::mt19937_64& rng);

}  // namespace memtrace::testing
