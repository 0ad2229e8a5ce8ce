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

#include "memtrace/stats.hpp"

#include <algorithm>
#include <cmath>

#include "memtrace/error.hpp"

namespace memtrace {

namespace {

std::uint64_t isqrt_ceil(std::uint64_t n) {
  auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(n)));
  while (r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r * r == n ? r : r + 1;
}

std::vector<std::uint64_t> sorted_copy(std::span<const std::uint64_t> values) {
  std::vector<std::uint64_t> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

std::size_t nearest_rank(std::size_t n, double p) {
  if (!(p > 0.0 && p <= 1.0)) throw InvalidP(p);
  const double exact = p * static_cast<double>(n);
  // p is usually a short decimal, so p*n can land a few ulps above an
  // integer (0.7 * 10 == 7.000000000000001). Snap those back.
  const double snapped = std::nearbyint(exact);
  const double r = std::abs(exact - snapped) <= 1e-9 * std::max(1.0, exact) ? snapped : std::ceil(exact);
  return std::clamp<std::size_t>(static_cast<std::size_t>(r), 1, n);
}

std::vector<EcdfPoint> ecdf(std::span<const std::uint64_t> values) {
  if (values.empty()) throw EmptyInput();
  const auto v = sorted_copy(values);
  const auto n = static_cast<double>(v.size());
  std::vector<EcdfPoint> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i + 1 < v.size() && v[i + 1] == v[i]) continue;
    const auto count = static_cast<std::uint64_t>(i + 1);
    out.push_back({v[i], count, count == v.size() ? 1.0 : static_cast<double>(count) / n});
  }
  return out;
}

std::uint64_t percentile(std::span<const std::uint64_t> values, double p) {
  if (values.empty()) throw EmptyInput();
  const auto k = nearest_rank(values.size(), p);
  std::vector<std::uint64_t> v(values.begin(), values.end());
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k - 1), v.end());
  return v[k - 1];
}

DistributionSummary summarize(std::span<const std::uint64_t> values) {
  if (values.empty()) throw EmptyInput();
  const auto v = sorted_copy(values);
  const auto n = v.size();

  DistributionSummary s;
  s.count = n;
  s.min_us = v.front();
  s.max_us = v.back();
  s.q1_us = v[nearest_rank(n, 0.25) - 1];
  s.median_us = v[nearest_rank(n, 0.5) - 1];
  s.q3_us = v[nearest_rank(n, 0.75) - 1];
  for (auto x : v) s.sum_us += x;

  const std::uint64_t range = s.max_us - s.min_us;
  if (range == 0) {
    s.histogram.push_back({static_cast<double>(s.min_us), static_cast<double>(s.max_us), n});
    return s;
  }
  const std::uint64_t bins = isqrt_ceil(n);
  s.histogram.resize(bins);
  for (std::uint64_t i = 0; i < bins; ++i) {
    s.histogram[i].lo_us = static_cast<double>(s.min_us) + static_cast<double>(range) * static_cast<double>(i) / static_cast<double>(bins);
    s.histogram[i].hi_us = static_cast<double>(s.min_us) + static_cast<double>(range) * static_cast<double>(i + 1) / static_cast<double>(bins);
  }
  for (auto x : v) {
    // floor((x - min) / (range / bins)) in exact integer arithmetic.
    auto bin = static_cast<std::uint64_t>(static_cast<unsigned __int128>(x - s.min_us) * bins / range);
    s.histogram[std::min(bin, bins - 1)].count += 1;
  }
  return s;
}

}  // namespace memtrace
