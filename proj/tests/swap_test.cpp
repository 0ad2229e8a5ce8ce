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

#include <doctest.h>

#include <random>

#include "memtrace/error.hpp"
#include "memtrace/swap.hpp"
#include "memtrace/synthgen.hpp"

using namespace memtrace;

namespace {

const BandwidthConfig kMeasured{6.4e9, 6.3e9};

// Alloc at 0, accesses at the given times, never freed.
BlockIndex one_block(std::uint64_t size, std::vector<std::uint64_t> accesses) {
  std::vector<MemoryEvent> events;
  events.push_back({0, 0, EventKind::Alloc, 1, size, {}, ContentClass::Intermediate, {}});
  for (auto t : accesses) events.push_back({events.size(), t, EventKind::Read, 1, size, {}, ContentClass::Intermediate, {}});
  return build_block_index(Trace(events));
}

SwapCandidate candidate(std::uint64_t id, std::uint64_t size, bool feasible, bool at_peak, std::int64_t margin = 0) {
  SwapCandidate c;
  c.block_id = id;
  c.size_bytes = size;
  c.feasible = feasible;
  c.overlaps_peak = at_peak;
  c.margin_bytes = margin;
  return c;
}

}  // namespace

TEST_CASE("max_swap_size reference values at 6.4e9 and 6.3e9 B/s") {
  // 25 us -> 79.37 KB; 0.8 s -> 2.54 GB.
  CHECK(std::abs(max_swap_size(25, kMeasured) / 1e3 - 79.37) <= 0.01);
  CHECK(std::abs(max_swap_size(800000, kMeasured) / 1e9 - 2.54) <= 0.01);
  CHECK(max_swap_size(0, kMeasured) == 0.0);
  // 10 us hides about 31.75 KB.
  CHECK(std::abs(max_swap_size(10, kMeasured) / 1e3 - 31.75) <= 0.01);
}

TEST_CASE("max_swap_size algebra") {
  std::mt19937_64 rng(31);
  std::uniform_int_distribution<std::uint64_t> gap(0, 10000000);
  std::uniform_real_distribution<double> bw(1e8, 5e10);
  for (int i = 0; i < 1000; ++i) {
    const auto t = gap(rng);
    const BandwidthConfig b{bw(rng), bw(rng)};
    REQUIRE(max_swap_size(2 * t, b) == 2 * max_swap_size(t, b));
    REQUIRE(max_swap_size(t, {2 * b.b_d2h, 2 * b.b_h2d}) == 2 * max_swap_size(t, b));
    REQUIRE(max_swap_size(t, {b.b_h2d, b.b_d2h}) == max_swap_size(t, b));
    REQUIRE(max_swap_size(t + 1, b) > max_swap_size(t, b));
    REQUIRE(max_swap_size(t + 1, {b.b_d2h * 1.5, b.b_h2d}) > max_swap_size(t + 1, b));
    REQUIRE(max_swap_size(t + 1, {b.b_d2h, b.b_h2d * 1.5}) > max_swap_size(t + 1, b));
  }
}

TEST_CASE("min_hiding_interval") {
  // 1.2e9 B * (1/6.4e9 + 1/6.3e9) s = 0.3779762 s, rounded up.
  CHECK(min_hiding_interval(1200000000, kMeasured) == 377977);
  CHECK(min_hiding_interval(1200000000, kMeasured) < 840211);
  CHECK(min_hiding_interval(0, kMeasured) == 0);
  CHECK(min_hiding_interval(1, kMeasured) == 1);

  std::mt19937_64 rng(32);
  for (int i = 0; i < 2000; ++i) {
    const auto size = std::uniform_int_distribution<std::uint64_t>(1, 5000000000ULL)(rng);
    const auto t = min_hiding_interval(size, kMeasured);
    REQUIRE(max_swap_size(t, kMeasured) >= static_cast<double>(size));
    REQUIRE(max_swap_size(t - 1, kMeasured) < static_cast<double>(size));

    const auto gap = std::uniform_int_distribution<std::uint64_t>(0, 2000000)(rng);
    const auto back = min_hiding_interval(static_cast<std::uint64_t>(max_swap_size(gap, kMeasured)), kMeasured);
    REQUIRE(back <= gap);
    REQUIRE(gap <= back + 1);
  }
}

TEST_CASE("bandwidth config") {
  const auto bw = parse_bandwidth_config("# measured\nb_d2h_bytes_per_s = 12.8e9\n\nb_h2d_bytes_per_s=1e9\n");
  CHECK(bw.b_d2h == 12.8e9);
  CHECK(bw.b_h2d == 1e9);
  CHECK(parse_bandwidth_config("b_h2d_bytes_per_s=5\n").b_d2h == 6.4e9);
  CHECK_THROWS_AS(parse_bandwidth_config("b_d2h_bytes_per_s=0\n"), ConfigError);
  CHECK_THROWS_AS(parse_bandwidth_config("b_d2h_bytes_per_s=fast\n"), ConfigError);
  CHECK_THROWS_AS(parse_bandwidth_config("pcie=1e9\n"), ConfigError);
  CHECK_THROWS_AS(parse_bandwidth_config("b_d2h_bytes_per_s\n"), ConfigError);
  CHECK_THROWS_AS((BandwidthConfig{-1.0, 1.0}.check()), ConfigError);
}

TEST_CASE("find_candidates") {
  SUBCASE("80 KB across a 25 us gap does not fit") {
    const auto index = one_block(80000, {100, 125});
    const auto c = find_candidates(index, compute_atis(index), kMeasured);
    REQUIRE(c.size() == 1);
    CHECK(c[0].gap_us == 25);
    CHECK_FALSE(c[0].feasible);
    // 79370.08 - 80000
    CHECK(c[0].margin_bytes == -630);
  }
  SUBCASE("1200 MB across an 840211 us gap fits") {
    const auto index = one_block(1200000000, {10, 10 + 840211});
    const auto c = find_candidates(index, compute_atis(index), kMeasured);
    REQUIRE(c.size() == 1);
    CHECK(c[0].feasible);
    CHECK(c[0].margin_bytes > 0);
    CHECK(c[0].overlaps_peak == false);  // the peak is at t=0, before the gap
  }
  SUBCASE("a block accessed once is not a candidate") {
    const auto index = one_block(64, {5});
    CHECK(find_candidates(index, compute_atis(index), kMeasured).empty());
  }
  SUBCASE("largest gap is used, earliest on ties") {
    const auto index = one_block(64, {0, 10, 30, 35, 55});
    const auto c = find_candidates(index, compute_atis(index), kMeasured);
    CHECK(c[0].gap_us == 20);
    CHECK(c[0].gap_start_us == 10);
  }
  SUBCASE("peak overlap uses a half-open gap") {
    const auto index = one_block(64, {0, 10});
    const auto atis = compute_atis(index);
    CHECK(find_candidates(index, atis, kMeasured, TimeWindow{0, 0})[0].overlaps_peak);
    CHECK(find_candidates(index, atis, kMeasured, TimeWindow{9, 9})[0].overlaps_peak);
    CHECK_FALSE(find_candidates(index, atis, kMeasured, TimeWindow{10, 20})[0].overlaps_peak);
    CHECK(find_candidates(index, atis, kMeasured, TimeWindow{5, 50})[0].overlaps_peak);
  }
  SUBCASE("feasibility is monotone in the gap") {
    for (std::uint64_t size : {1000ULL, 79370ULL, 79371ULL, 5000000ULL}) {
      bool was_feasible = false;
      for (std::uint64_t gap = 1; gap < 2000; gap += 7) {
        const auto index = one_block(size, {0, gap});
        const bool f = find_candidates(index, compute_atis(index), kMeasured)[0].feasible;
        REQUIRE((!was_feasible || f));
        was_feasible = f;
      }
    }
  }
  SUBCASE("margin and feasibility agree") {
    std::mt19937_64 rng(33);
    for (int i = 0; i < 500; ++i) {
      const auto size = std::uniform_int_distribution<std::uint64_t>(1, 100000000)(rng);
      const auto gap = std::uniform_int_distribution<std::uint64_t>(1, 50000)(rng);
      const auto index = one_block(size, {0, gap});
      const auto c = find_candidates(index, compute_atis(index), kMeasured)[0];
      REQUIRE(c.feasible == (c.margin_bytes >= 0));
      REQUIRE(c.feasible == (static_cast<double>(size) <= max_swap_size(gap, kMeasured)));
    }
  }
}

TEST_CASE("rank_candidates") {
  SUBCASE("feasible at peak, larger first; savings add up") {
    const auto plan = rank_candidates({candidate(1, 100000000, true, true), candidate(2, 1000000000, true, true)});
    CHECK(plan.ranked[0].block_id == 2);
    CHECK(plan.ranked[1].block_id == 1);
    CHECK(plan.estimated_savings_bytes == 1100000000);
  }
  SUBCASE("no feasible candidates, no savings") {
    const auto plan = rank_candidates({candidate(1, 10, false, true), candidate(2, 20, false, true)});
    CHECK(plan.estimated_savings_bytes == 0);
    CHECK(plan.ranked[0].block_id == 2);
  }
  SUBCASE("full ordering rule") {
    const auto plan = rank_candidates({
        candidate(1, 500, false, true),
        candidate(2, 10, true, false, 50),
        candidate(3, 10, true, true, 5),
        candidate(4, 10, true, true, 9),
        candidate(5, 900, false, false),
        candidate(6, 20, true, true, 1),
        candidate(7, 10, true, true, 9),
    });
    std::vector<std::uint64_t> order;
    for (const auto& c : plan.ranked) order.push_back(c.block_id);
    CHECK(order == std::vector<std::uint64_t>{6, 4, 7, 3, 2, 5, 1});
    CHECK(plan.estimated_savings_bytes == 50);
  }
  SUBCASE("planted outlier ranks first and savings stay under the peak") {
    const auto g = plant_outlier(MlpConfig{}, 1200000000, 840211);
    const auto index = build_block_index(g.trace);
    const auto plan = rank_candidates(find_candidates(index, compute_atis(index), kMeasured));
    REQUIRE_FALSE(plan.ranked.empty());
    CHECK(plan.ranked[0].block_id == *g.manifest.planted_block_id);
    CHECK(plan.ranked[0].feasible);
    CHECK(plan.ranked[0].overlaps_peak);
    CHECK(plan.estimated_savings_bytes <= peak_memory(index).bytes);
  }
  SUBCASE("savings never exceed the peak on generated traces") {
    for (std::uint64_t batch : {1u, 32u, 512u}) {
      MlpConfig c;
      c.batch = batch;
      const auto index = build_block_index(generate_mlp(c).trace);
      const auto plan = rank_candidates(find_candidates(index, compute_atis(index), kMeasured));
      CHECK(plan.estimated_savings_bytes <= peak_memory(index).bytes);
    }
  }
}
