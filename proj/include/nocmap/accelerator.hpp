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
#include <functional>
#include <vector>

#include "nocmap/mapping.hpp"
#include "nocmap/noc.hpp"
#include "nocmap/topology.hpp"
#include "nocmap/workload.hpp"

namespace nocmap {

/* Per-task travel time decomposition, all in NoC cycles:
 *   t_req        request head departs the PE NI -> tail reaches the MC
 *   t_memaccess  request tail arrival -> response head departs the MC NI
 *                (queue wait + access delay + NI serialization wait)
 *   t_resp       response head departure -> tail reaches the PE
 *   t_compu      compute time, PE cycles scaled to NoC cycles
 * t_travel is exactly the sum of the four. */
struct TravelRecord {
  std::int64_t task_id = 0;
  int pe_node = 0;
  std::int64_t t_req = 0;
  std::int64_t t_memaccess = 0;
  std::int64_t t_resp = 0;
  std::int64_t t_compu = 0;
  std::int64_t t_travel = 0;
};

struct PEStats {
  int pe_node = 0;
  std::int64_t task_count = 0;
  std::int64_t accumulated = 0;     // sum of t_travel
  std::int64_t end_to_end_sum = 0;  // task issue -> result tail at the MC
};

enum class RecorderMode { Aggregate, PerTask };

struct LayerRunResult {
  int layer_id = 0;
  std::vector<PEStats> stats;                      // ascending PE node id
  std::vector<std::vector<TravelRecord>> records;  // PerTask mode only
  std::uint64_t makespan = 0;                      // last result tail arrival

  double mean_end_to_end(size_t i) const;
  double mean_travel(size_t i) const;
  /* Sum/count pairs for the travel-time mapping strategies. PEs that ran no
   * task carry count 0; the strategies decide how to treat them. */
  TravelTimeSummary travel_summary() const;
};

std::int64_t accumulate_busy(const std::vector<TravelRecord>& records);

/* Fractional-rate memory service. Busy time advances by exactly
 * cycles_per_value * data_values per request, kept in integer ticks of
 * 1/cycles_per_value.den() cycle; the response injects at the next whole
 * cycle boundary. Requests are served in arrival order. */
class MemoryController {
 public:
  MemoryController(int node, Ratio cycles_per_value);

  int node() const { return node_; }
  /* Returns the response injection cycle, always > arrive_cycle. */
  std::uint64_t service(std::uint64_t arrive_cycle, std::int64_t data_values);

 private:
  int node_;
  Ratio per_value_;
  std::int64_t busy_ticks_ = 0;  // busy horizon * per_value_.den()
};

/* Executes one layer under a fixed mapping plan: every PE walks its task
 * FIFO through request -> memory service -> response -> compute -> result,
 * issuing the next request the cycle its result is handed to the NI. */
LayerRunResult run_layer(const Topology& topo, const SimConfig& cfg,
                         const LayerSpec& layer, int layer_id,
                         const MappingPlan& plan, RecorderMode mode,
                         const std::function<void(const TraceEvent&)>& trace = {});

/* Two-phase execution with a global barrier: phase1 runs to completion, the
 * planner turns the measured samples into a plan for the remaining ids
 * [phase1.total_tasks(), total), and execution continues on the same warm
 * network. Sampled tasks count toward all metrics. */
using RemainderPlanner = std::function<MappingPlan(const TravelTimeSummary&)>;
LayerRunResult run_layer_two_phase(
    const Topology& topo, const SimConfig& cfg, const LayerSpec& layer,
    int layer_id, const MappingPlan& phase1, std::int64_t total,
    const RemainderPlanner& planner, RecorderMode mode,
    const std::function<void(const TraceEvent&)>& trace = {});

}  // namespace nocmap
