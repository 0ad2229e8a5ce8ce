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

// Deterministic trace generator for a two-layer MLP training loop
// (mat_mul -> add_bias -> ReLU -> mat_mul -> add_bias), with a manifest of
// ground-truth quantities for checking the analyses.
//
// Layout of the emitted trace:
//   warm-up    Alloc+Write of W0, b0, W1, b1 (PARAM), then Alloc of the
//              persistent gradient buffers dW0, db0, dW1, db1 (INTER)
//   iteration  input upload, forward activations, loss gradient, backward
//              gradients, SGD update; every activation and activation
//              gradient is freed inside the iteration
// Parameters and their gradient buffers stay live to the end of the trace.
//
// Time: every event is stamped with the current clock, which then advances
// by ceil(size_bytes / bytes_per_us). Events of a planted outlier are
// stamped at their scheduled instants and do not advance the clock.

#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "memtrace/trace.hpp"

namespace memtrace {

struct MlpConfig {
  std::uint64_t d_in = 2;
  std::uint64_t d_hidden = 12288;
  std::uint64_t d_out = 2;
  std::uint64_t batch = 512;
  std::uint64_t iterations = 5;
  std::uint64_t element_bytes = 4;
  std::uint64_t bytes_per_us = 10000;

  /// Throws ConfigError if any field is zero.
  void check() const;
  /// W0 + b0 + W1 + b1 in bytes.
  std::uint64_t parameter_bytes() const;
};

struct ManifestBlock {
  std::string name;
  ContentClass content_class = ContentClass::Unknown;
  std::uint64_t size_bytes = 0;
  /// Read + Write events.
  std::uint64_t accesses = 0;
  friend bool operator==(const ManifestBlock&, const ManifestBlock&) = default;
};

struct Manifest {
  std::uint64_t warmup_events = 0;
  std::uint64_t events_per_iteration = 0;
  std::uint64_t iterations = 0;
  std::uint64_t total_events = 0;
  std::uint64_t peak_bytes = 0;
  std::uint64_t peak_timestamp_us = 0;
  std::array<std::uint64_t, kNumClasses> class_bytes_at_peak{};
  std::uint64_t parameter_bytes = 0;
  std::map<std::uint64_t, ManifestBlock> blocks;
  std::optional<std::uint64_t> planted_block_id;

  friend bool operator==(const Manifest&, const Manifest&) = default;
};

struct GeneratedTrace {
  Trace trace;
  Manifest manifest;
};

GeneratedTrace generate_mlp(const MlpConfig& config);

/// generate_mlp plus one INTER block of `size_bytes` written once and read
/// once `idle_us` later, with the gap covering the peak of the base trace.
/// Throws ConfigError on a zero size or idle time.
GeneratedTrace plant_outlier(const MlpConfig& config, std::uint64_t size_bytes, std::uint64_t idle_us);

/// key=value lines, a blank line, then a block_id,name,class,size_bytes,accesses table.
std::string write_manifest(const Manifest& manifest);
Manifest parse_manifest(std::string_view text);

/// "run/mlp.memtrace" -> "run/mlp.manifest".
std::string manifest_path_for(const std::string& trace_path);

}  // namespace memtrace
