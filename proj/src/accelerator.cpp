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

#include "nocmap/accelerator.hpp"

#include <deque>
#include <map>

namespace nocmap {

double LayerRunResult::mean_end_to_end(size_t i) const {
  const PEStats& s = stats[i];
  if (s.task_count == 0) return 0.0;
  return static_cast<double>(s.end_to_end_sum) / static_cast<double>(s.task_count);
}

double LayerRunResult::mean_travel(size_t i) const {
  const PEStats& s = stats[i];
  if (s.task_count == 0) return 0.0;
  return static_cast<double>(s.accumulated) / static_cast<double>(s.task_count);
}

TravelTimeSummary LayerRunResult::travel_summary() const {
  TravelTimeSummary sum;
  sum.sum_travel.reserve(stats.size());
  sum.sample_count.reserve(stats.size());
  for (const PEStats& s : stats) {
    sum.sum_travel.push_back(s.accumulated);
    sum.sample_count.push_back(s.task_count);
  }
  return sum;
}

std::int64_t accumulate_busy(const std::vector<TravelRecord>& records) {
  std::int64_t total = 0;
  for (const TravelRecord& r : records) total += r.t_travel;
  return total;
}

MemoryController::MemoryController(int node, Ratio cycles_per_value)
    : node_(node), per_value_(cycles_per_value) {
  if (!per_value_.positive())
    throw ConfigError("memory service time per value must be positive");
}

std::uint64_t MemoryController::service(std::uint64_t arrive_cycle,
                                        std::int64_t data_values) {
  if (data_values < 1) throw InvariantError("memory request without data");
  const std::int64_t den = per_value_.den();
  const std::int64_t arrive_ticks = static_cast<std::int64_t>(arrive_cycle) * den;
  const std::int64_t start = std::max(busy_ticks_, arrive_ticks);
  busy_ticks_ = start + data_values * per_value_.num();
  return static_cast<std::uint64_t>(ceil_div(busy_ticks_, den));
}

namespace {

struct TaskTiming {
  int pe_node = -1;
  std::uint64_t issued = 0;
  std::uint64_t req_head = 0;
  std::uint64_t req_tail = 0;
  std::uint64_t resp_head = 0;
  std::uint64_t resp_tail = 0;
};

struct PERun {
  int node = 0;
  int pe_index = 0;
  int mc_node = 0;
  std::deque<std::int64_t> fifo;
  bool busy = false;
};

struct Action {
  enum Kind { ResponseReady, ComputeDone } kind = ResponseReady;
  int actor = 0;  // MC node or PE index
  std::int64_t task = 0;
};

class LayerExecutor {
 public:
  LayerExecutor(const Topology& topo, const SimConfig& cfg,
                const LayerSpec& layer, int layer_id, const MappingPlan& phase1,
                std::int64_t total, const RemainderPlanner& planner,
                RecorderMode mode,
                const std::function<void(const TraceEvent&)>& trace)
      : topo_(topo),
        cfg_(cfg),
        layer_(layer),
        planner_(planner),
        mode_(mode),
        total_(total),
        net_(topo, cfg) {
    cfg_.validate();
    profile_ = task_profile(layer);
    packets_ = packet_spec(layer, cfg.flit_payload_bytes);
    t_compu_ = compute_cycles(profile_.mac_ops, cfg.macs_per_pe) *
               cfg.clock_ratio();
    if (trace) net_.set_trace(trace);

    if (phase1.pe_nodes != topo.pe_nodes())
      throw InvariantError("mapping plan PE set does not match the topology");
    if (total_ != tasks_for_layer(layer))
      throw InvariantError("run total does not match the layer's task population");
    const std::int64_t phase1_total = phase1.total_tasks();
    phase1.check_partition(0, phase1_total);
    if (planner_) {
      if (phase1_total >= total_)
        throw InvariantError("two-phase run with nothing left after phase 1");
      barrier_pending_ = phase1_total;
    } else if (phase1_total != total_) {
      throw InvariantError("mapping plan does not cover the layer's tasks");
    }

    result_.layer_id = layer_id;
    result_.stats.resize(phase1.pe_nodes.size());
    if (mode_ == RecorderMode::PerTask)
      result_.records.resize(phase1.pe_nodes.size());
    pes_.resize(phase1.pe_nodes.size());
    for (size_t i = 0; i < phase1.pe_nodes.size(); ++i) {
      pes_[i].node = phase1.pe_nodes[i];
      pes_[i].pe_index = static_cast<int>(i);
      pes_[i].mc_node = topo.nearest_mc(phase1.pe_nodes[i]);
      pes_[i].fifo.assign(phase1.tasks[i].begin(), phase1.tasks[i].end());
      result_.stats[i].pe_node = phase1.pe_nodes[i];
      pe_index_of_[phase1.pe_nodes[i]] = static_cast<int>(i);
    }
    for (int mc : topo.mc_nodes())
      mcs_.emplace(mc, MemoryController(mc, cfg.mem_cycles_per_value()));

    timings_.resize(static_cast<size_t>(total_));
    remaining_ = total_;
    if (planner_) {
      sampled_.sum_travel.assign(pes_.size(), 0);
      sampled_.sample_count.assign(pes_.size(), 0);
    }
  }

  LayerRunResult run() {
    for (PERun& pe : pes_) issue_next(pe, 0);

    std::uint64_t quiet = 0;
    while (remaining_ > 0) {
      const std::uint64_t c = net_.now();
      bool acted = false;
      auto it = due_.begin();
      if (it != due_.end()) {
        if (it->first < c) throw InvariantError("scheduled action missed its cycle");
        if (it->first == c) {
          const std::vector<Action> acts = std::move(it->second);
          due_.erase(it);
          for (const Action& a : acts) handle_action(a, c);
          acted = true;
        }
      }

      const std::vector<DeliveryEvent> evs = net_.step();
      for (const DeliveryEvent& ev : evs) handle_delivery(ev);

      if (!acted && evs.empty()) {
        if (due_.empty() && net_.idle())
          throw InvariantError("layer execution deadlocked with tasks pending");
        if (due_.empty() && ++quiet >= cfg_.livelock_bound)
          throw LivelockError("no task progress for " +
                              std::to_string(cfg_.livelock_bound) + " cycles");
      } else {
        quiet = 0;
      }
    }

    if (!net_.idle())
      throw InvariantError("network still busy after the last result");
    net_.check_invariants();
    return std::move(result_);
  }

 private:
  void issue_next(PERun& pe, std::uint64_t at_cycle) {
    if (pe.busy || pe.fifo.empty()) return;
    const std::int64_t task = pe.fifo.front();
    pe.fifo.pop_front();
    pe.busy = true;
    TaskTiming& t = timings_[static_cast<size_t>(task)];
    t.pe_node = pe.node;
    t.issued = at_cycle;
    net_.enqueue_injection(PacketKind::Request, pe.node, pe.mc_node,
                           packets_.request_flits, task, at_cycle);
  }

  void handle_action(const Action& a, std::uint64_t c) {
    if (a.kind == Action::ResponseReady) {
      const TaskTiming& t = timings_[static_cast<size_t>(a.task)];
      net_.enqueue_injection(PacketKind::Response, a.actor, t.pe_node,
                             packets_.response_flits, a.task, c);
      return;
    }
    finish_task(a.actor, a.task, c);
  }

  void finish_task(int pe_index, std::int64_t task, std::uint64_t c) {
    PERun& pe = pes_[static_cast<size_t>(pe_index)];
    const TaskTiming& t = timings_[static_cast<size_t>(task)];

    TravelRecord rec;
    rec.task_id = task;
    rec.pe_node = pe.node;
    rec.t_req = static_cast<std::int64_t>(t.req_tail - t.req_head);
    rec.t_memaccess = static_cast<std::int64_t>(t.resp_head - t.req_tail);
    rec.t_resp = static_cast<std::int64_t>(t.resp_tail - t.resp_head);
    rec.t_compu = t_compu_;
    rec.t_travel = rec.t_req + rec.t_memaccess + rec.t_resp + rec.t_compu;

    PEStats& st = result_.stats[static_cast<size_t>(pe_index)];
    ++st.task_count;
    st.accumulated += rec.t_travel;
    if (mode_ == RecorderMode::PerTask)
      result_.records[static_cast<size_t>(pe_index)].push_back(rec);

    net_.enqueue_injection(PacketKind::Result, pe.node, pe.mc_node,
                           packets_.result_flits, task, c);
    pe.busy = false;

    if (barrier_pending_ > 0) {
      sampled_.sum_travel[static_cast<size_t>(pe_index)] += rec.t_travel;
      ++sampled_.sample_count[static_cast<size_t>(pe_index)];
      if (--barrier_pending_ == 0) {
        release_barrier(c);
        return;  // release_barrier issues every idle PE, including this one
      }
      /* The FIFO still holds only this PE's own samples; once they are
       * exhausted the PE idles at the barrier. */
      issue_next(pe, c);
      return;
    }
    issue_next(pe, c);
  }

  void release_barrier(std::uint64_t c) {
    const MappingPlan plan = planner_(sampled_);
    const std::int64_t done = sampled_total();
    plan.check_partition(done, total_ - done);
    if (plan.pe_nodes != topo_.pe_nodes())
      throw InvariantError("remainder plan PE set does not match the topology");
    for (size_t i = 0; i < pes_.size(); ++i)
      pes_[i].fifo.insert(pes_[i].fifo.end(), plan.tasks[i].begin(),
                          plan.tasks[i].end());
    for (PERun& pe : pes_) issue_next(pe, c);
  }

  std::int64_t sampled_total() const {
    std::int64_t n = 0;
    for (std::int64_t k : sampled_.sample_count) n += k;
    return n;
  }

  void handle_delivery(const DeliveryEvent& ev) {
    TaskTiming& t = timings_[static_cast<size_t>(ev.payload_ref)];
    switch (ev.kind) {
      case PacketKind::Request: {
        t.req_head = ev.head_depart_cycle;
        t.req_tail = ev.tail_arrive_cycle;
        auto mc = mcs_.find(ev.dst);
        if (mc == mcs_.end())
          throw InvariantError("request delivered to a non-MC node");
        const std::uint64_t inject =
            mc->second.service(ev.tail_arrive_cycle, profile_.data_values);
        due_[inject].push_back({Action::ResponseReady, ev.dst, ev.payload_ref});
        break;
      }
      case PacketKind::Response: {
        t.resp_head = ev.head_depart_cycle;
        t.resp_tail = ev.tail_arrive_cycle;
        const std::uint64_t done =
            ev.tail_arrive_cycle + static_cast<std::uint64_t>(t_compu_);
        due_[done].push_back(
            {Action::ComputeDone, pe_index_of_.at(ev.dst), ev.payload_ref});
        break;
      }
      case PacketKind::Result: {
        --remaining_;
        if (ev.tail_arrive_cycle > result_.makespan)
          result_.makespan = ev.tail_arrive_cycle;
        PEStats& st = result_.stats[static_cast<size_t>(pe_index_of_.at(ev.src))];
        st.end_to_end_sum +=
            static_cast<std::int64_t>(ev.tail_arrive_cycle - t.issued);
        break;
      }
    }
  }

  const Topology& topo_;
  SimConfig cfg_;
  LayerSpec layer_;
  RemainderPlanner planner_;
  RecorderMode mode_;
  std::int64_t total_ = 0;

  Network net_;
  TaskProfile profile_;
  PacketSpec packets_;
  std::int64_t t_compu_ = 0;

  std::vector<PERun> pes_;
  std::map<int, MemoryController> mcs_;
  std::map<int, int> pe_index_of_;
  std::vector<TaskTiming> timings_;
  std::map<std::uint64_t, std::vector<Action>> due_;

  std::int64_t remaining_ = 0;
  std::int64_t barrier_pending_ = 0;
  TravelTimeSummary sampled_;
  LayerRunResult result_;
};

}  // namespace

LayerRunResult run_layer(const Topology& topo, const SimConfig& cfg,
                         const LayerSpec& layer, int layer_id,
                         const MappingPlan& plan, RecorderMode mode,
                         const std::function<void(const TraceEvent&)>& trace) {
  LayerExecutor ex(topo, cfg, layer, layer_id, plan, plan.total_tasks(), nullptr,
                   mode, trace);
  return ex.run();
}

LayerRunResult run_layer_two_phase(
    const Topology& topo, const SimConfig& cfg, const LayerSpec& layer,
    int layer_id, const MappingPlan& phase1, std::int64_t total,
    const RemainderPlanner& planner, RecorderMode mode,
    const std::function<void(const TraceEvent&)>& trace) {
  if (!planner) throw InvariantError("two-phase run requires a planner");
  LayerExecutor ex(topo, cfg, layer, layer_id, phase1, total, planner, mode,
                   trace);
  return ex.run();
}

}  // namespace nocmap
