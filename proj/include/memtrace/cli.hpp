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
#include <ostream>
#include <string>
#include <vector>

#include "memtrace/lifetime.hpp"
#include "memtrace/report.hpp"
#include "memtrace/swap.hpp"
#include "memtrace/trace.hpp"

namespace memtrace {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitInput = 2;

struct AnalyzeOptions {
  BandwidthConfig bandwidth;
  AtiOptions ati;
  TableFormat format = TableFormat::Csv;
  std::optional<std::size_t> max_warmup;
  std::optional<TimeWindow> peak_window;
  /// Shown in the summary; not used to read anything.
  std::string trace_label;
};

struct EmittedFile {
  std::string name;
  std::size_t rows = 0;
};

struct ReportBundle {
  std::string output_dir;
  std::vector<EmittedFile> files;
};

/// Runs every analysis on `trace` and writes the tables plus summary.txt
/// into `output_dir` (created if missing).
ReportBundle write_report_bundle(const Trace& trace, const AnalyzeOptions& opts, const std::string& output_dir);

/// Command-line entry point. Returns 0 on success, 1 on usage errors and
/// 2 on input or validation errors.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
/// Same, with `args` excluding the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace memtrace
