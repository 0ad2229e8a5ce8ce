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

// Distribution statistics over ATI populations. Percentiles use the
// nearest-rank rule throughout, so every reported quantile is a sample value.

#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace memtrace {

struct EcdfPoint {
  std::uint64_t value = 0;
  /// Number of samples <= value.
  std::uint64_t cumulative_count = 0;
  double fraction = 0.0;
};

/// Sorted unique values with F(v) = #(x <= v) / n. Throws EmptyInput.
std::vector<EcdfPoint> ecdf(std::span<const std::uint64_t> values);

/// The ceil(p * n)-th smallest value. Throws EmptyInput or InvalidP.
std::uint64_t percentile(std::span<const std::uint64_t> values, double p);

/// 1-based nearest rank for fraction p of n samples.
std::size_t nearest_rank(std::size_t n, double p);

struct HistogramBin {
  double lo_us = 0.0;
  double hi_us = 0.0;
  std::uint64_t count = 0;
};

struct DistributionSummary {
  std::uint64_t count = 0;
  std::uint64_t min_us = 0;
  std::uint64_t q1_us = 0;
  std::uint64_t median_us = 0;
  std::uint64_t q3_us = 0;
  std::uint64_t max_us = 0;
  /// Exact sum; the mean is sum_us / count.
  std::uint64_t sum_us = 0;
  /// ceil(sqrt(n)) equal-width bins over [min, max]; one bin when min == max.
  std::vector<HistogramBin> histogram;

  double mean_us() const { return count == 0 ? 0.0 : static_cast<double>(sum_us) / static_cast<double>(count); }
};

DistributionSummary summarize(std::span<const std::uint64_t> values);

}  // namespace memtrace
