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

#include <optional>
#include <string>
#include <vector>

#include "nocmap/accelerator.hpp"
#include "nocmap/mapping.hpp"
#include "nocmap/metrics.hpp"
#include "nocmap/noc.hpp"
#include "nocmap/topology.hpp"
#include "nocmap/workload.hpp"

namespace nocmap {

enum class Strategy { RowMajor, Distance, StaticLatency, PostRun, Sampling };

struct StrategyChoice {
  Strategy kind = Strategy::RowMajor;
  int window = 10;  // Sampling only

  friend bool operator==(const StrategyChoice&, const StrategyChoice&) = default;
};

/* "row-major" | "distance" | "static-latency" | "post-run" | "sampling:<w>" */
StrategyChoice parse_strategy(const std::string& text);
std::string strategy_name(const StrategyChoice& choice);

enum class SweepAxis { None, OutputChannels, KernelSize, Architecture, Window };

struct ScenarioConfig {
  std::string name = "scenario";
  TopologyConfig topology;
  SimConfig sim;
  std::vector<LayerSpec> layers;  // defaults to the LeNet preset
  StrategyChoice strategy;
  std::optional<StaticLatencyParams> static_latency;  // topology defaults if unset
  SweepAxis axis = SweepAxis::None;
  std::string output = "report.csv";

  StaticLatencyParams static_params(const Topology& topo) const;
};

/* Strict JSON: unknown keys are ConfigErrors. */
ScenarioConfig parse_config_json(const std::string& text);
ScenarioConfig load_config(const std::string& path);

/* One line of the report CSV
 * (scenario,layer,strategy,pe,accumulated,mean_end_to_end,makespan,rho,improvement_pct).
 * Empty cells are absent optionals. layer is "1"-based or "model"; pe is a
 * node id for per-PE rows or "all" for summary rows. rho is over per-PE
 * accumulated latencies; improvement_pct compares makespans (model rows:
 * whole-model totals) against row-major. */
struct ReportRow {
  std::string scenario;
  std::string layer;
  std::string strategy;
  std::string pe;
  std::optional<std::int64_t> accumulated;
  std::optional<double> mean_end_to_end;
  std::optional<std::uint64_t> makespan;
  std::optional<double> rho;
  std::optional<double> improvement_pct;

  friend bool operator==(const ReportRow&, const ReportRow&) = default;
};

std::string format_report(const std::vector<ReportRow>& rows);
std::vector<ReportRow> parse_report(const std::string& text);
void write_report(const std::string& path, const std::vector<ReportRow>& rows);

/* Per-task record CSV (layer,pe,task,t_req,t_mem,t_resp,t_compu,t_travel). */
struct RecordRow {
  int layer = 0;
  int pe = 0;
  std::int64_t task = 0;
  std::int64_t t_req = 0;
  std::int64_t t_mem = 0;
  std::int64_t t_resp = 0;
  std::int64_t t_compu = 0;
  std::int64_t t_travel = 0;
};

std::string format_records(const std::vector<RecordRow>& rows);

/* One strategy executed over every layer of a workload. Layers run on a
 * fresh (drained) network each; the whole-model figure is the sum of layer
 * makespans. */
struct StrategyRun {
  StrategyChoice choice;
  std::vector<LayerRunResult> layers;
  std::uint64_t model_total() const;
};

/* Post-run needs the row-major pass of the same workload as its measurement
 * source (and improvement always needs it as baseline); pass it in to avoid
 * re-running. */
StrategyRun run_strategy(const Topology& topo, const SimConfig& sim,
                         const std::vector<LayerSpec>& layers,
                         const StrategyChoice& choice,
                         const StaticLatencyParams& sl_params, RecorderMode mode,
                         const StrategyRun* row_major = nullptr,
                         const std::function<void(const TraceEvent&)>& trace = {});

struct ScenarioResult {
  StrategyRun baseline;                 // row-major
  std::optional<StrategyRun> strategy;  // when the configured strategy differs
  std::vector<ReportRow> rows;
  std::vector<RecordRow> records;  // PerTask mode, reported strategy only

  const StrategyRun& reported() const {
    return strategy ? *strategy : baseline;
  }
};

ScenarioResult run_scenario(const ScenarioConfig& cfg,
                            RecorderMode mode = RecorderMode::Aggregate,
                            const std::function<void(const TraceEvent&)>& trace = {});

struct SweepPoint {
  std::string label;
  ScenarioConfig cfg;
  std::vector<StrategyChoice> strategies;
};

/* Expands the configured axis:
 *   output_channels: first-layer workload, channels {3,6,12,24,48}
 *   kernel_size:     first-layer workload, kernel {1,3,..,13}, same-size output
 *   architecture:    config workload on the 2-MC and 4-MC platforms
 *   window:          config workload, sampling window {1,5,10,default}
 * Every point runs all five strategies (the window axis overrides the
 * sampling window). */
std::vector<SweepPoint> sweep_points(const ScenarioConfig& cfg);

/* Summary + model rows for every (point, strategy), in point order. With
 * parallel=true points run under OpenMP; output is byte-identical to the
 * serial mode. */
std::vector<ReportRow> run_sweep(const ScenarioConfig& cfg, bool parallel);

}  // namespace nocmap
