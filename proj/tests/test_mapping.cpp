/* Copyright 2026 The nocmap Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <algorithm>
#include <random>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "doctest.h"
#include "nocmap/mapping.hpp"

using namespace nocmap;
using std::int64_t;

namespace {

std::vector<Ratio> ints(std::initializer_list<int64_t> ws) {
  std::vector<Ratio> out;
  for (int64_t w : ws) out.emplace_back(w, 1);
  return out;
}

/* a <= b for reduced nonnegative rationals, by cross multiplication. */
bool ratio_le(const Ratio& a, const Ratio& b) {
  return a.num() * b.den() <= b.num() * a.den();
}

}  // namespace

TEST_CASE("inverse-time allocation, hand-checked examples") {
  CHECK(solve_inverse_time_allocation(ints({1, 1, 1}), 10) ==
        std::vector<int64_t>{4, 3, 3});
  CHECK(solve_inverse_time_allocation(ints({1, 2}), 9) ==
        std::vector<int64_t>{6, 3});
  CHECK(solve_inverse_time_allocation(ints({1, 2, 3}), 11) ==
        std::vector<int64_t>{6, 3, 2});
  CHECK(solve_inverse_time_allocation(ints({1, 2, 3}), 12) ==
        std::vector<int64_t>{7, 3, 2});
  CHECK(solve_inverse_time_allocation(ints({1, 1}), 3) ==
        std::vector<int64_t>{2, 1});
  /* Fewer tasks than PEs: slower PEs may end up with zero. */
  CHECK(solve_inverse_time_allocation(ints({2, 1, 1}), 2) ==
        std::vector<int64_t>{0, 1, 1});
  CHECK(solve_inverse_time_allocation(ints({5, 7}), 0) ==
        std::vector<int64_t>{0, 0});
  CHECK(solve_inverse_time_allocation({}, 0).empty());
}

TEST_CASE("inverse-time allocation rejects bad input") {
  CHECK_THROWS_AS(solve_inverse_time_allocation(ints({1, 0}), 4), InvariantError);
  CHECK_THROWS_AS(solve_inverse_time_allocation({}, 4), InvariantError);
  CHECK_THROWS_AS(solve_inverse_time_allocation(ints({1}), -1), InvariantError);
}

TEST_CASE("allocation is invariant under common weight scaling") {
  std::mt19937 rng(20260816);
  std::uniform_int_distribution<int64_t> wdist(1, 100);
  std::uniform_int_distribution<int64_t> tdist(0, 5000);
  for (int trial = 0; trial < 200; ++trial) {
    const size_t n = 2 + static_cast<size_t>(rng() % 9);
    std::vector<Ratio> w;
    for (size_t i = 0; i < n; ++i) w.emplace_back(wdist(rng), 1 + rng() % 7);
    const int64_t total = tdist(rng);
    const auto base = solve_inverse_time_allocation(w, total);

    for (int64_t k : {int64_t{2}, int64_t{3}, int64_t{7}}) {
      std::vector<Ratio> scaled;
      for (const Ratio& r : w) scaled.push_back(r.scaled(k));
      CHECK(solve_inverse_time_allocation(scaled, total) == base);
    }
    /* Rational factor 3/2 as well. */
    std::vector<Ratio> frac;
    for (const Ratio& r : w) frac.emplace_back(r.num() * 3, r.den() * 2);
    CHECK(solve_inverse_time_allocation(frac, total) == base);
  }
}

TEST_CASE("allocation sums to total and respects weight order") {
  std::mt19937 rng(7);
  std::uniform_int_distribution<int64_t> wdist(1, 100);
  for (int trial = 0; trial < 200; ++trial) {
    const size_t n = 2 + static_cast<size_t>(rng() % 9);
    std::vector<Ratio> w;
    for (size_t i = 0; i < n; ++i) w.emplace_back(wdist(rng), 1);
    const int64_t total = static_cast<int64_t>(rng() % 4000);
    const auto counts = solve_inverse_time_allocation(w, total);

    int64_t sum = 0;
    for (int64_t c : counts) sum += c;
    CHECK(sum == total);
    /* Strictly smaller weight (faster PE) never gets fewer tasks. */
    for (size_t i = 0; i < n; ++i)
      for (size_t j = 0; j < n; ++j)
        if (w[i].num() < w[j].num()) CHECK(counts[i] >= counts[j]);
  }
}

TEST_CASE("allocation balances weighted finish times within one max weight") {
  /* With c_i proportional to 1/w_i, the weighted loads c_i * w_i can differ
   * by at most max(w) once every PE has at least one task. */
  std::mt19937 rng(99);
  std::uniform_int_distribution<int64_t> wdist(1, 100);
  for (int trial = 0; trial < 100; ++trial) {
    const size_t n = 2 + static_cast<size_t>(rng() % 9);
    std::vector<Ratio> w;
    for (size_t i = 0; i < n; ++i) w.emplace_back(wdist(rng), 1);
    const int64_t total = 200 * static_cast<int64_t>(n);
    const auto counts = solve_inverse_time_allocation(w, total);

    Ratio lo(0, 1), hi(0, 1), wmax(0, 1);
    for (size_t i = 0; i < n; ++i) {
      REQUIRE(counts[i] > 0);
      const Ratio load = w[i].scaled(counts[i]);
      if (i == 0 || !ratio_le(lo, load)) lo = load;
      if (i == 0 || ratio_le(hi, load)) hi = load;
      if (!ratio_le(w[i], wmax)) wmax = w[i];
    }
    const Ratio spread(hi.num() * lo.den() - lo.num() * hi.den(),
                       hi.den() * lo.den());
    CHECK(ratio_le(spread, wmax));
  }
}

TEST_CASE("allocation matches an arbitrary-precision rational reference") {
  namespace mp = boost::multiprecision;
  std::mt19937 rng(31415);
  std::uniform_int_distribution<int64_t> wdist(1, 1000);
  for (int trial = 0; trial < 100; ++trial) {
    const size_t n = 2 + static_cast<size_t>(rng() % 12);
    std::vector<Ratio> w;
    for (size_t i = 0; i < n; ++i) w.emplace_back(wdist(rng), 1 + rng() % 16);
    const int64_t total = static_cast<int64_t>(rng() % 10000);

    /* Reference: exact rational targets, floor, then largest remainder with
     * ties to the lower index. */
    std::vector<mp::cpp_rational> inv(n);
    mp::cpp_rational s = 0;
    for (size_t i = 0; i < n; ++i) {
      inv[i] = mp::cpp_rational(w[i].den(), w[i].num());
      s += inv[i];
    }
    std::vector<int64_t> want(n);
    std::vector<mp::cpp_rational> rem(n);
    int64_t assigned = 0;
    for (size_t i = 0; i < n; ++i) {
      const mp::cpp_rational target = total * inv[i] / s;
      const mp::cpp_int fl =
          mp::numerator(target) / mp::denominator(target);
      want[i] = static_cast<int64_t>(fl);
      rem[i] = target - mp::cpp_rational(fl);
      assigned += want[i];
    }
    std::vector<size_t> order(n);
    for (size_t i = 0; i < n; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&rem](size_t x, size_t y) { return rem[x] > rem[y]; });
    for (int64_t k = 0; k < total - assigned; ++k)
      ++want[order[static_cast<size_t>(k)]];

    CHECK(solve_inverse_time_allocation(w, total) == want);
  }
}

TEST_CASE("row-major split on the default platform") {
  const Topology topo((TopologyConfig{}));
  const MappingPlan plan = map_row_major(topo, 31);
  plan.check_partition(0, 31);
  REQUIRE(plan.pe_nodes.size() == 14);
  /* 31 = 2*14 + 3: the three lowest PE ids get the extra round. */
  for (size_t i = 0; i < 14; ++i)
    CHECK(plan.tasks[i].size() == (i < 3 ? 3 : 2));
  CHECK(plan.tasks[0] == std::vector<int64_t>{0, 14, 28});
  CHECK(plan.tasks[5] == std::vector<int64_t>{5, 19});
}

TEST_CASE("distance-based split on the default platform") {
  const Topology topo((TopologyConfig{}));
  const MappingPlan plan = map_distance_based(topo, 4704);
  plan.check_partition(0, 4704);
  const std::vector<int64_t> want = {162, 243, 243, 162, 243, 487, 487,
                                     243, 487, 487, 243, 487, 487, 243};
  CHECK(plan.counts() == want);
  /* Blocks are contiguous in PE id order. */
  CHECK(plan.tasks[0].front() == 0);
  CHECK(plan.tasks[0].back() == 161);
  CHECK(plan.tasks[1].front() == 162);
}

TEST_CASE("static latency estimate for the big convolution layer") {
  const Topology topo((TopologyConfig{}));
  const LayerSpec c1 = lenet_layers()[0];
  const StaticLatencyParams params = StaticLatencyParams::defaults(topo);
  CHECK(params.t_link == 2);
  /* t_compu 10, memory 50/16, 4 response flits:
   * 10 + 50/16 + d*2 + 3 + 2. */
  CHECK(static_latency_estimate(c1, 1, params, 64, 10, Ratio(1, 16), 32) ==
        Ratio(161, 8));
  CHECK(static_latency_estimate(c1, 2, params, 64, 10, Ratio(1, 16), 32) ==
        Ratio(177, 8));
  CHECK(static_latency_estimate(c1, 3, params, 64, 10, Ratio(1, 16), 32) ==
        Ratio(193, 8));
}

TEST_CASE("static latency split on a 2x2 mesh, hand-checked") {
  TopologyConfig cfg;
  cfg.width = 2;
  cfg.height = 2;
  cfg.mc_nodes = {3};
  const Topology topo(cfg);

  const LayerSpec pool{LayerKind::Pool, "p", 4, 4, 1, 1, 4, 0, 4};
  const StaticLatencyParams params = StaticLatencyParams::defaults(topo);
  /* Node 0 sits two hops from the MC, nodes 1 and 2 one hop:
   * estimates 17 and 15, so 47 tasks split 15/16/16. */
  CHECK(static_latency_estimate(pool, 2, params, 64, 10, Ratio(1, 16), 32) ==
        Ratio(17, 1));
  CHECK(static_latency_estimate(pool, 1, params, 64, 10, Ratio(1, 16), 32) ==
        Ratio(15, 1));
  const MappingPlan plan =
      map_static_latency(topo, pool, params, 64, 10, Ratio(1, 16), 32, 47);
  plan.check_partition(0, 47);
  CHECK(plan.counts() == std::vector<int64_t>{15, 16, 16});
}

TEST_CASE("post-run split uses measured means, unmeasured PEs get nothing") {
  TopologyConfig cfg;
  cfg.width = 4;
  cfg.height = 1;
  cfg.mc_nodes = {0};
  const Topology topo(cfg);

  TravelTimeSummary measured;
  measured.sum_travel = {30, 20, 0};
  measured.sample_count = {2, 1, 0};
  /* Means 15 and 20; 7 tasks split 4/3, the unmeasured PE stays empty. */
  const MappingPlan plan = map_post_run(topo, measured, 7);
  plan.check_partition(0, 7);
  CHECK(plan.counts() == std::vector<int64_t>{4, 3, 0});
  CHECK(plan.tasks[0] == std::vector<int64_t>{0, 1, 2, 3});
  CHECK(plan.tasks[1] == std::vector<int64_t>{4, 5, 6});

  TravelTimeSummary empty;
  empty.sum_travel = {0, 0, 0};
  empty.sample_count = {0, 0, 0};
  CHECK_THROWS_AS(map_post_run(topo, empty, 7), InvariantError);

  TravelTimeSummary short_sum;
  short_sum.sum_travel = {1};
  short_sum.sample_count = {1};
  CHECK_THROWS_AS(map_post_run(topo, short_sum, 7), InvariantError);
}

TEST_CASE("sampling controller thresholds and phases") {
  TopologyConfig cfg;
  cfg.width = 3;
  cfg.height = 1;
  cfg.mc_nodes = {0};
  const Topology topo(cfg);  // two PEs

  SUBCASE("below threshold falls back to row-major") {
    SamplingWindowController ctl(topo, 3, 1);
    CHECK(ctl.use_row_major());
    const MappingPlan plan = ctl.row_major_plan();
    plan.check_partition(0, 3);
    CHECK(plan.tasks[0] == std::vector<int64_t>{0, 2});
    CHECK(plan.tasks[1] == std::vector<int64_t>{1});
    CHECK_THROWS_AS(ctl.phase1_plan(), InvariantError);
    TravelTimeSummary s;
    s.sum_travel = {1, 1};
    s.sample_count = {1, 1};
    CHECK_THROWS_AS(ctl.remainder_plan(s), InvariantError);
  }

  SUBCASE("two-phase split, hand-checked") {
    SamplingWindowController ctl(topo, 8, 1);
    CHECK_FALSE(ctl.use_row_major());
    CHECK(ctl.phase1_total() == 2);
    const MappingPlan p1 = ctl.phase1_plan();
    p1.check_partition(0, 2);
    CHECK(p1.tasks[0] == std::vector<int64_t>{0});
    CHECK(p1.tasks[1] == std::vector<int64_t>{1});

    TravelTimeSummary sampled;
    sampled.sum_travel = {15, 19};
    sampled.sample_count = {1, 1};
    const MappingPlan p2 = ctl.remainder_plan(sampled);
    p2.check_partition(2, 6);
    CHECK(p2.tasks[0] == std::vector<int64_t>{2, 3, 4});
    CHECK(p2.tasks[1] == std::vector<int64_t>{5, 6, 7});
  }

  SUBCASE("threshold is exact") {
    CHECK(SamplingWindowController(topo, 4, 1).use_row_major() == false);
    CHECK(SamplingWindowController(topo, 39, 10).use_row_major() == true);
    CHECK(SamplingWindowController(topo, 40, 10).use_row_major() == false);
    CHECK_THROWS_AS(SamplingWindowController(topo, 4, 0), ConfigError);
  }
}

TEST_CASE("partition checks catch broken plans") {
  const Topology topo((TopologyConfig{}));
  MappingPlan plan = map_row_major(topo, 20);
  plan.tasks[0][0] = 19;  // duplicate
  CHECK_THROWS_AS(plan.check_partition(0, 20), InvariantError);

  MappingPlan drop = map_row_major(topo, 20);
  drop.tasks[1].pop_back();
  CHECK_THROWS_AS(drop.check_partition(0, 20), InvariantError);

  MappingPlan ok = map_row_major(topo, 20);
  ok.check_partition(0, 20);
  CHECK_THROWS_AS(ok.check_partition(1, 20), InvariantError);
}
