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

#include "nocmap/mapping.hpp"

#include <algorithm>
#include <numeric>

#include <boost/multiprecision/cpp_int.hpp>

namespace nocmap {

using boost::multiprecision::cpp_int;

std::int64_t MappingPlan::total_tasks() const {
  std::int64_t n = 0;
  for (const auto& t : tasks) n += static_cast<std::int64_t>(t.size());
  return n;
}

std::vector<std::int64_t> MappingPlan::counts() const {
  std::vector<std::int64_t> c;
  c.reserve(tasks.size());
  for (const auto& t : tasks) c.push_back(static_cast<std::int64_t>(t.size()));
  return c;
}

void MappingPlan::check_partition(std::int64_t first_id,
                                  std::int64_t expected_total) const {
  if (pe_nodes.size() != tasks.size())
    throw InvariantError("mapping plan PE/task list size mismatch");
  std::vector<std::int64_t> all;
  all.reserve(static_cast<size_t>(expected_total));
  for (const auto& t : tasks) all.insert(all.end(), t.begin(), t.end());
  if (static_cast<std::int64_t>(all.size()) != expected_total)
    throw InvariantError("mapping plan does not cover the task range");
  std::sort(all.begin(), all.end());
  for (std::int64_t i = 0; i < expected_total; ++i)
    if (all[static_cast<size_t>(i)] != first_id + i)
      throw InvariantError("mapping plan is not a partition of the task range");
}

std::vector<std::int64_t> solve_inverse_time_allocation(
    const std::vector<Ratio>& weights, std::int64_t total) {
  if (total < 0) throw InvariantError("negative task total");
  const size_t n = weights.size();
  if (n == 0) {
    if (total != 0) throw InvariantError("tasks but no PEs to map them to");
    return {};
  }
  for (const Ratio& w : weights)
    if (!w.positive()) throw InvariantError("allocation weights must be positive");

  /* 1/w_i = den_i/num_i. With Q = prod_j num_j, the integer
   * A_i = den_i * Q / num_i is proportional to 1/w_i, so shares are
   * total * A_i / sum(A). Exact integers throughout: scaling every weight by
   * a common factor scales all A_i together and changes nothing. */
  cpp_int q = 1;
  for (const Ratio& w : weights) q *= w.num();
  std::vector<cpp_int> a(n);
  cpp_int s = 0;
  for (size_t i = 0; i < n; ++i) {
    a[i] = cpp_int(weights[i].den()) * (q / weights[i].num());
    s += a[i];
  }

  std::vector<std::int64_t> counts(n);
  std::vector<cpp_int> rem(n);
  std::int64_t assigned = 0;
  for (size_t i = 0; i < n; ++i) {
    const cpp_int target = a[i] * total;
    counts[i] = static_cast<std::int64_t>(target / s);
    rem[i] = target % s;
    assigned += counts[i];
  }

  std::int64_t leftover = total - assigned;  // < n by construction
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t{0});
  std::sort(order.begin(), order.end(), [&rem](size_t x, size_t y) {
    if (rem[x] != rem[y]) return rem[x] > rem[y];
    return x < y;
  });
  for (std::int64_t k = 0; k < leftover; ++k) ++counts[order[static_cast<size_t>(k)]];
  return counts;
}

namespace {

/* Contiguous id blocks in PE order starting at first_id. */
MappingPlan blocks_from_counts(const Topology& topo,
                               const std::vector<std::int64_t>& counts,
                               std::int64_t first_id) {
  MappingPlan plan;
  plan.pe_nodes = topo.pe_nodes();
  plan.tasks.resize(plan.pe_nodes.size());
  std::int64_t next = first_id;
  for (size_t i = 0; i < counts.size(); ++i) {
    plan.tasks[i].reserve(static_cast<size_t>(counts[i]));
    for (std::int64_t k = 0; k < counts[i]; ++k) plan.tasks[i].push_back(next++);
  }
  return plan;
}

std::vector<Ratio> distance_weights(const Topology& topo) {
  std::vector<Ratio> w;
  w.reserve(topo.distance_classes().size());
  for (const DistanceClass& dc : topo.distance_classes())
    w.emplace_back(dc.distance, 1);
  return w;
}

}  // namespace

MappingPlan map_row_major(const Topology& topo, std::int64_t total) {
  if (total < 0) throw InvariantError("negative task total");
  MappingPlan plan;
  plan.pe_nodes = topo.pe_nodes();
  const std::int64_t n = static_cast<std::int64_t>(plan.pe_nodes.size());
  plan.tasks.resize(static_cast<size_t>(n));
  for (std::int64_t i = 0; i < n; ++i)
    for (std::int64_t t = i; t < total; t += n)
      plan.tasks[static_cast<size_t>(i)].push_back(t);
  return plan;
}

MappingPlan map_distance_based(const Topology& topo, std::int64_t total) {
  return blocks_from_counts(
      topo, solve_inverse_time_allocation(distance_weights(topo), total), 0);
}

StaticLatencyParams StaticLatencyParams::defaults(const Topology& topo) {
  StaticLatencyParams p;
  p.t_link = topo.router_delay() + topo.link_delay();
  return p;
}

Ratio static_latency_estimate(const LayerSpec& layer, int distance,
                              const StaticLatencyParams& params,
                              int macs_per_cycle, int clock_ratio,
                              Ratio mem_cycles_per_value, int payload_bytes) {
  const TaskProfile prof = task_profile(layer);
  const std::int64_t t_compu =
      compute_cycles(prof.mac_ops, macs_per_cycle) * clock_ratio;
  const Ratio t_mem = mem_cycles_per_value.scaled(prof.data_values);
  const int flits = packet_spec(layer, payload_bytes).response_flits;
  const std::int64_t whole = t_compu + distance * params.t_link +
                             (flits - 1) * params.t_flit + params.t_fixed;
  return Ratio(t_mem.num() + whole * t_mem.den(), t_mem.den());
}

MappingPlan map_static_latency(const Topology& topo, const LayerSpec& layer,
                               const StaticLatencyParams& params,
                               int macs_per_cycle, int clock_ratio,
                               Ratio mem_cycles_per_value, int payload_bytes,
                               std::int64_t total) {
  std::vector<Ratio> w;
  w.reserve(topo.distance_classes().size());
  for (const DistanceClass& dc : topo.distance_classes())
    w.push_back(static_latency_estimate(layer, dc.distance, params,
                                        macs_per_cycle, clock_ratio,
                                        mem_cycles_per_value, payload_bytes));
  return blocks_from_counts(topo, solve_inverse_time_allocation(w, total), 0);
}

namespace {

std::vector<Ratio> travel_weights(const Topology& topo,
                                  const TravelTimeSummary& measured) {
  const size_t n = topo.pe_nodes().size();
  if (measured.sum_travel.size() != n || measured.sample_count.size() != n)
    throw InvariantError("travel time summary does not match PE count");
  std::vector<Ratio> w;
  w.reserve(n);
  for (size_t i = 0; i < n; ++i) {
    if (measured.sample_count[i] <= 0)
      throw InvariantError("travel time summary with unsampled PE");
    w.push_back(measured.mean(i));
  }
  return w;
}

}  // namespace

MappingPlan map_post_run(const Topology& topo, const TravelTimeSummary& measured,
                         std::int64_t total) {
  const size_t n = topo.pe_nodes().size();
  if (measured.sum_travel.size() != n || measured.sample_count.size() != n)
    throw InvariantError("travel time summary does not match PE count");
  /* A recording pass over fewer tasks than PEs leaves some PEs unmeasured;
   * they get no share rather than an invented weight. */
  std::vector<size_t> active;
  std::vector<Ratio> w;
  for (size_t i = 0; i < n; ++i) {
    if (measured.sample_count[i] > 0) {
      active.push_back(i);
      w.push_back(measured.mean(i));
    }
  }
  if (active.empty())
    throw InvariantError("post-run mapping without any measurements");
  const std::vector<std::int64_t> sub = solve_inverse_time_allocation(w, total);
  std::vector<std::int64_t> counts(n, 0);
  for (size_t k = 0; k < active.size(); ++k) counts[active[k]] = sub[k];
  return blocks_from_counts(topo, counts, 0);
}

SamplingWindowController::SamplingWindowController(const Topology& topo,
                                                   std::int64_t total, int window)
    : topo_(&topo), total_(total), window_(window) {
  if (window_ < 1) throw ConfigError("sampling window must be >= 1");
  if (total_ < 0) throw InvariantError("negative task total");
}

bool SamplingWindowController::use_row_major() const {
  const std::int64_t n = static_cast<std::int64_t>(topo_->pe_nodes().size());
  return total_ < 2 * n * window_;
}

MappingPlan SamplingWindowController::row_major_plan() const {
  return map_row_major(*topo_, total_);
}

std::int64_t SamplingWindowController::phase1_total() const {
  return static_cast<std::int64_t>(topo_->pe_nodes().size()) * window_;
}

MappingPlan SamplingWindowController::phase1_plan() const {
  if (use_row_major())
    throw InvariantError("phase1_plan on a layer below the sampling threshold");
  return map_row_major(*topo_, phase1_total());
}

MappingPlan SamplingWindowController::remainder_plan(
    const TravelTimeSummary& sampled) const {
  if (use_row_major())
    throw InvariantError("remainder_plan on a layer below the sampling threshold");
  const std::int64_t remaining = total_ - phase1_total();
  return blocks_from_counts(
      *topo_,
      solve_inverse_time_allocation(travel_weights(*topo_, sampled), remaining),
      phase1_total());
}

}  // namespace nocmap
