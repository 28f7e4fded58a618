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

#pragma once

#include <cstdint>
#include <vector>

#include "nocmap/common.hpp"
#include "nocmap/topology.hpp"
#include "nocmap/workload.hpp"

namespace nocmap {

/* Task ids per PE, in ascending PE node id order (parallel to
 * Topology::pe_nodes()). A plan always partitions a dense id range. */
struct MappingPlan {
  std::vector<int> pe_nodes;
  std::vector<std::vector<std::int64_t>> tasks;

  std::int64_t total_tasks() const;
  std::vector<std::int64_t> counts() const;
  /* Throws InvariantError unless the plan is exactly a partition of
   * [first_id, first_id + expected_total). */
  void check_partition(std::int64_t first_id, std::int64_t expected_total) const;
};

/* Share `total` items over PEs proportionally to 1/weights[i], exactly:
 * real share s_i = total * (1/w_i) / sum_j(1/w_j), rounded by largest
 * remainder; remainder ties go to the lower index. All arithmetic is exact
 * (arbitrary-precision integers), so scaling every weight by the same
 * positive factor returns bitwise-identical counts. Weights must be > 0. */
std::vector<std::int64_t> solve_inverse_time_allocation(
    const std::vector<Ratio>& weights, std::int64_t total);

/* Even split in PE id order: task t goes to PE (t mod N); leftover tasks of
 * the final iteration land on the lowest PE ids. */
MappingPlan map_row_major(const Topology& topo, std::int64_t total);

/* Inverse-distance shares (weight = hops to the serving MC), assigned as
 * contiguous id blocks in PE id order. */
MappingPlan map_distance_based(const Topology& topo, std::int64_t total);

struct StaticLatencyParams {
  std::int64_t t_link = 2;   // per-hop cost: router + link traversal
  std::int64_t t_flit = 1;   // per-flit serialization cost
  std::int64_t t_fixed = 2;  // protocol overhead per task

  static StaticLatencyParams defaults(const Topology& topo);
};

/* Closed-form per-task latency estimate for a PE at `distance` hops from its
 * MC: compute time + pure memory access delay + distance * t_link +
 * (response_flits - 1) * t_flit + t_fixed. No queueing terms. */
Ratio static_latency_estimate(const LayerSpec& layer, int distance,
                              const StaticLatencyParams& params,
                              int macs_per_cycle, int clock_ratio,
                              Ratio mem_cycles_per_value, int payload_bytes);

/* Inverse static-latency shares, contiguous id blocks. */
MappingPlan map_static_latency(const Topology& topo, const LayerSpec& layer,
                               const StaticLatencyParams& params,
                               int macs_per_cycle, int clock_ratio,
                               Ratio mem_cycles_per_value, int payload_bytes,
                               std::int64_t total);

/* Measured mean travel time per PE, the weight source for the two
 * travel-time strategies. Sums are integer cycle counts, so mean weights are
 * exact rationals sum/count. */
struct TravelTimeSummary {
  std::vector<std::int64_t> sum_travel;    // per PE, ascending PE id
  std::vector<std::int64_t> sample_count;  // per PE, all > 0

  Ratio mean(size_t i) const {
    return Ratio(sum_travel[i], sample_count[i]);
  }
};

/* Inverse mean-travel-time shares over the full task range, contiguous id
 * blocks; used after a complete recording pass of the same layer. */
MappingPlan map_post_run(const Topology& topo, const TravelTimeSummary& measured,
                         std::int64_t total);

/* Two-phase sampling-window strategy. Phase 1 hands every PE `window` tasks
 * (the row-major prefix of the id range); once all samples complete, the
 * remaining ids are shared by inverse measured mean travel time. Layers too
 * small to sample fall back to plain row-major. */
class SamplingWindowController {
 public:
  SamplingWindowController(const Topology& topo, std::int64_t total, int window);

  int window() const { return window_; }
  /* total < 2 * pe_count * window: not enough work to amortize sampling. */
  bool use_row_major() const;
  MappingPlan row_major_plan() const;
  MappingPlan phase1_plan() const;
  std::int64_t phase1_total() const;
  MappingPlan remainder_plan(const TravelTimeSummary& sampled) const;

 private:
  const Topology* topo_;
  std::int64_t total_;
  int window_;
};

}  // namespace nocmap
