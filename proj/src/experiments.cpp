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

#include "nocmap/experiments.hpp"

#include <cstdio>
#include <exception>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace nocmap {

using nlohmann::json;

StrategyChoice parse_strategy(const std::string& text) {
  if (text == "row-major") return {Strategy::RowMajor, 10};
  if (text == "distance") return {Strategy::Distance, 10};
  if (text == "static-latency") return {Strategy::StaticLatency, 10};
  if (text == "post-run") return {Strategy::PostRun, 10};
  const std::string prefix = "sampling:";
  if (text.rfind(prefix, 0) == 0) {
    const std::string arg = text.substr(prefix.size());
    int window = 0;
    try {
      size_t used = 0;
      window = std::stoi(arg, &used);
      if (used != arg.size()) throw std::invalid_argument(arg);
    } catch (const std::exception&) {
      throw ConfigError("bad sampling window '" + arg + "'");
    }
    if (window < 1) throw ConfigError("sampling window must be >= 1");
    return {Strategy::Sampling, window};
  }
  throw ConfigError("unknown strategy '" + text + "'");
}

std::string strategy_name(const StrategyChoice& choice) {
  switch (choice.kind) {
    case Strategy::RowMajor: return "row-major";
    case Strategy::Distance: return "distance";
    case Strategy::StaticLatency: return "static-latency";
    case Strategy::PostRun: return "post-run";
    case Strategy::Sampling: return "sampling:" + std::to_string(choice.window);
  }
  throw InvariantError("unknown strategy kind");
}

StaticLatencyParams ScenarioConfig::static_params(const Topology& topo) const {
  return static_latency.value_or(StaticLatencyParams::defaults(topo));
}

namespace {

void check_keys(const json& j, std::initializer_list<const char*> allowed,
                const char* where) {
  if (!j.is_object())
    throw ConfigError(std::string(where) + " must be a JSON object");
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* a : allowed)
      if (item.key() == a) {
        known = true;
        break;
      }
    if (!known)
      throw ConfigError("unknown key '" + item.key() + "' in " + where);
  }
}

template <typename T>
T get_field(const json& j, const char* key, T fallback, const char* where) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("bad value for '") + key + "' in " + where);
  }
}

LayerSpec layer_from_json(const json& j) {
  check_keys(j,
             {"kind", "name", "input_h", "input_w", "in_channels",
              "out_channels", "kernel", "padding", "stride"},
             "workload.layers[]");
  LayerSpec l;
  const std::string kind = get_field<std::string>(j, "kind", "", "layer");
  if (kind == "conv")
    l.kind = LayerKind::Conv;
  else if (kind == "pool")
    l.kind = LayerKind::Pool;
  else if (kind == "fc")
    l.kind = LayerKind::FullyConnected;
  else
    throw ConfigError("layer kind must be conv, pool or fc");
  l.name = get_field<std::string>(j, "name", "", "layer");
  l.input_h = get_field<int>(j, "input_h", 1, "layer");
  l.input_w = get_field<int>(j, "input_w", 1, "layer");
  l.in_channels = get_field<int>(j, "in_channels", 1, "layer");
  l.out_channels = get_field<int>(j, "out_channels", 1, "layer");
  l.kernel = get_field<int>(j, "kernel", 1, "layer");
  l.padding = get_field<int>(j, "padding", 0, "layer");
  l.stride = get_field<int>(j, "stride", 1, "layer");
  l.validate();
  return l;
}

}  // namespace

ScenarioConfig parse_config_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  check_keys(j,
             {"name", "topology", "sim", "workload", "strategy",
              "static_latency", "sweep_axis", "output"},
             "config");

  ScenarioConfig cfg;
  cfg.name = get_field<std::string>(j, "name", cfg.name, "config");
  cfg.output = get_field<std::string>(j, "output", cfg.output, "config");

  if (j.contains("topology")) {
    const json& t = j.at("topology");
    check_keys(t, {"width", "height", "mc_nodes", "link_delay", "router_delay"},
               "topology");
    cfg.topology.width = get_field<int>(t, "width", cfg.topology.width, "topology");
    cfg.topology.height =
        get_field<int>(t, "height", cfg.topology.height, "topology");
    cfg.topology.mc_nodes = get_field<std::vector<int>>(
        t, "mc_nodes", cfg.topology.mc_nodes, "topology");
    cfg.topology.link_delay =
        get_field<int>(t, "link_delay", cfg.topology.link_delay, "topology");
    cfg.topology.router_delay =
        get_field<int>(t, "router_delay", cfg.topology.router_delay, "topology");
  }

  if (j.contains("sim")) {
    const json& s = j.at("sim");
    check_keys(s,
               {"vc_count", "vc_buffer_flits", "noc_clock_mhz", "pe_clock_mhz",
                "macs_per_pe", "flit_payload_bytes", "mem_bandwidth_gb_s",
                "livelock_bound"},
               "sim");
    cfg.sim.vc_count = get_field<int>(s, "vc_count", cfg.sim.vc_count, "sim");
    cfg.sim.vc_buffer_flits =
        get_field<int>(s, "vc_buffer_flits", cfg.sim.vc_buffer_flits, "sim");
    cfg.sim.noc_clock_mhz = get_field<std::int64_t>(s, "noc_clock_mhz",
                                                    cfg.sim.noc_clock_mhz, "sim");
    cfg.sim.pe_clock_mhz =
        get_field<std::int64_t>(s, "pe_clock_mhz", cfg.sim.pe_clock_mhz, "sim");
    cfg.sim.macs_per_pe = get_field<int>(s, "macs_per_pe", cfg.sim.macs_per_pe, "sim");
    cfg.sim.flit_payload_bytes = get_field<int>(s, "flit_payload_bytes",
                                                cfg.sim.flit_payload_bytes, "sim");
    cfg.sim.mem_bandwidth_gb_s = get_field<std::int64_t>(
        s, "mem_bandwidth_gb_s", cfg.sim.mem_bandwidth_gb_s, "sim");
    cfg.sim.livelock_bound = get_field<std::uint64_t>(s, "livelock_bound",
                                                      cfg.sim.livelock_bound, "sim");
  }

  cfg.layers = lenet_layers();
  if (j.contains("workload")) {
    const json& w = j.at("workload");
    check_keys(w, {"preset", "layers"}, "workload");
    if (w.contains("preset") && w.contains("layers"))
      throw ConfigError("workload takes either a preset or a layer list");
    if (w.contains("preset")) {
      const std::string p = w.at("preset").get<std::string>();
      if (p == "lenet")
        cfg.layers = lenet_layers();
      else if (p == "lenet-first")
        cfg.layers = {lenet_first_layer()};
      else
        throw ConfigError("unknown workload preset '" + p + "'");
    } else if (w.contains("layers")) {
      cfg.layers.clear();
      for (const json& lj : w.at("layers")) cfg.layers.push_back(layer_from_json(lj));
      if (cfg.layers.empty()) throw ConfigError("workload.layers is empty");
    }
  }

  if (j.contains("strategy"))
    cfg.strategy = parse_strategy(j.at("strategy").get<std::string>());

  if (j.contains("static_latency")) {
    const json& p = j.at("static_latency");
    check_keys(p, {"t_link", "t_flit", "t_fixed"}, "static_latency");
    StaticLatencyParams sl;
    sl.t_link = get_field<std::int64_t>(p, "t_link", 2, "static_latency");
    sl.t_flit = get_field<std::int64_t>(p, "t_flit", 1, "static_latency");
    sl.t_fixed = get_field<std::int64_t>(p, "t_fixed", 2, "static_latency");
    if (sl.t_link < 0 || sl.t_flit < 0 || sl.t_fixed < 0)
      throw ConfigError("static latency terms must be nonnegative");
    cfg.static_latency = sl;
  }

  if (j.contains("sweep_axis")) {
    const std::string a = j.at("sweep_axis").get<std::string>();
    if (a == "none")
      cfg.axis = SweepAxis::None;
    else if (a == "output_channels")
      cfg.axis = SweepAxis::OutputChannels;
    else if (a == "kernel_size")
      cfg.axis = SweepAxis::KernelSize;
    else if (a == "architecture")
      cfg.axis = SweepAxis::Architecture;
    else if (a == "window")
      cfg.axis = SweepAxis::Window;
    else
      throw ConfigError("unknown sweep_axis '" + a + "'");
  }

  /* Fail on inconsistent sections now, not mid-run. */
  (void)Topology(cfg.topology);
  cfg.sim.validate();
  for (const LayerSpec& l : cfg.layers) l.validate();
  return cfg;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_json(buf.str());
}

namespace {

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

void append_cell(std::string& line, const std::string& cell, bool first = false) {
  if (!first) line.push_back(',');
  line += cell;
}

}  // namespace

std::string format_report(const std::vector<ReportRow>& rows) {
  std::string out =
      "scenario,layer,strategy,pe,accumulated,mean_end_to_end,makespan,rho,"
      "improvement_pct\n";
  for (const ReportRow& r : rows) {
    std::string line;
    append_cell(line, r.scenario, true);
    append_cell(line, r.layer);
    append_cell(line, r.strategy);
    append_cell(line, r.pe);
    append_cell(line, r.accumulated ? std::to_string(*r.accumulated) : "");
    append_cell(line, r.mean_end_to_end ? fmt_double(*r.mean_end_to_end) : "");
    append_cell(line, r.makespan ? std::to_string(*r.makespan) : "");
    append_cell(line, r.rho ? fmt_double(*r.rho) : "");
    append_cell(line, r.improvement_pct ? fmt_double(*r.improvement_pct) : "");
    out += line;
    out.push_back('\n');
  }
  return out;
}

std::vector<ReportRow> parse_report(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line))
    throw ConfigError("report CSV is empty");
  if (line ==
      "scenario,layer,strategy,pe,accumulated,mean_end_to_end,makespan,rho,"
      "improvement_pct") {
    /* header ok */
  } else {
    throw ConfigError("report CSV header mismatch");
  }

  std::vector<ReportRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.push_back("");
    if (cells.size() != 9)
      throw ConfigError("report CSV row with " + std::to_string(cells.size()) +
                        " cells");
    ReportRow r;
    r.scenario = cells[0];
    r.layer = cells[1];
    r.strategy = cells[2];
    r.pe = cells[3];
    try {
      if (!cells[4].empty()) r.accumulated = std::stoll(cells[4]);
      if (!cells[5].empty()) r.mean_end_to_end = std::stod(cells[5]);
      if (!cells[6].empty()) r.makespan = std::stoull(cells[6]);
      if (!cells[7].empty()) r.rho = std::stod(cells[7]);
      if (!cells[8].empty()) r.improvement_pct = std::stod(cells[8]);
    } catch (const std::exception&) {
      throw ConfigError("report CSV row with a malformed number: " + line);
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

void write_report(const std::string& path, const std::vector<ReportRow>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open output file '" + path + "'");
  out << format_report(rows);
  if (!out) throw ConfigError("failed writing output file '" + path + "'");
}

std::string format_records(const std::vector<RecordRow>& rows) {
  std::string out = "layer,pe,task,t_req,t_mem,t_resp,t_compu,t_travel\n";
  for (const RecordRow& r : rows) {
    out += std::to_string(r.layer);
    out.push_back(',');
    out += std::to_string(r.pe);
    out.push_back(',');
    out += std::to_string(r.task);
    out.push_back(',');
    out += std::to_string(r.t_req);
    out.push_back(',');
    out += std::to_string(r.t_mem);
    out.push_back(',');
    out += std::to_string(r.t_resp);
    out.push_back(',');
    out += std::to_string(r.t_compu);
    out.push_back(',');
    out += std::to_string(r.t_travel);
    out.push_back('\n');
  }
  return out;
}

std::uint64_t StrategyRun::model_total() const {
  std::uint64_t total = 0;
  for (const LayerRunResult& l : layers) total += l.makespan;
  return total;
}

StrategyRun run_strategy(const Topology& topo, const SimConfig& sim,
                         const std::vector<LayerSpec>& layers,
                         const StrategyChoice& choice,
                         const StaticLatencyParams& sl_params, RecorderMode mode,
                         const StrategyRun* row_major,
                         const std::function<void(const TraceEvent&)>& trace) {
  if (choice.kind == Strategy::PostRun &&
      (row_major == nullptr || row_major->layers.size() != layers.size()))
    throw InvariantError("post-run mapping requires a completed row-major pass");

  StrategyRun run;
  run.choice = choice;
  run.layers.reserve(layers.size());
  for (size_t li = 0; li < layers.size(); ++li) {
    const LayerSpec& layer = layers[li];
    const int layer_id = static_cast<int>(li) + 1;
    const std::int64_t total = tasks_for_layer(layer);

    switch (choice.kind) {
      case Strategy::RowMajor:
        run.layers.push_back(run_layer(topo, sim, layer, layer_id,
                                       map_row_major(topo, total), mode, trace));
        break;
      case Strategy::Distance:
        run.layers.push_back(run_layer(topo, sim, layer, layer_id,
                                       map_distance_based(topo, total), mode,
                                       trace));
        break;
      case Strategy::StaticLatency:
        run.layers.push_back(run_layer(
            topo, sim, layer, layer_id,
            map_static_latency(topo, layer, sl_params, sim.macs_per_pe,
                               sim.clock_ratio(), sim.mem_cycles_per_value(),
                               sim.flit_payload_bytes, total),
            mode, trace));
        break;
      case Strategy::PostRun:
        run.layers.push_back(run_layer(
            topo, sim, layer, layer_id,
            map_post_run(topo, row_major->layers[li].travel_summary(), total),
            mode, trace));
        break;
      case Strategy::Sampling: {
        SamplingWindowController ctl(topo, total, choice.window);
        if (ctl.use_row_major()) {
          run.layers.push_back(run_layer(topo, sim, layer, layer_id,
                                         ctl.row_major_plan(), mode, trace));
        } else {
          run.layers.push_back(run_layer_two_phase(
              topo, sim, layer, layer_id, ctl.phase1_plan(), total,
              [&ctl](const TravelTimeSummary& s) { return ctl.remainder_plan(s); },
              mode, trace));
        }
        break;
      }
    }
  }
  return run;
}

namespace {

std::optional<double> rho_of_values(const std::vector<double>& vals) {
  if (vals.size() < 2) return std::nullopt;
  return unevenness(vals).rho;
}

std::optional<double> rho_accumulated(const LayerRunResult& lr) {
  std::vector<double> vals;
  for (const PEStats& s : lr.stats)
    if (s.task_count > 0) vals.push_back(static_cast<double>(s.accumulated));
  return rho_of_values(vals);
}

std::optional<double> rho_model(const StrategyRun& run) {
  if (run.layers.empty()) return std::nullopt;
  std::vector<double> sums(run.layers.front().stats.size(), 0.0);
  for (const LayerRunResult& lr : run.layers)
    for (size_t i = 0; i < lr.stats.size(); ++i)
      sums[i] += static_cast<double>(lr.stats[i].accumulated);
  std::vector<double> vals;
  for (double v : sums)
    if (v > 0.0) vals.push_back(v);
  return rho_of_values(vals);
}

void append_run_rows(std::vector<ReportRow>& out, const std::string& scenario,
                     const StrategyRun& run, const StrategyRun& baseline,
                     bool per_pe_rows) {
  const std::string sname = strategy_name(run.choice);
  for (size_t li = 0; li < run.layers.size(); ++li) {
    const LayerRunResult& lr = run.layers[li];
    const std::string label = std::to_string(li + 1);
    if (per_pe_rows) {
      for (size_t i = 0; i < lr.stats.size(); ++i) {
        const PEStats& s = lr.stats[i];
        ReportRow r;
        r.scenario = scenario;
        r.layer = label;
        r.strategy = sname;
        r.pe = std::to_string(s.pe_node);
        r.accumulated = s.accumulated;
        if (s.task_count > 0) r.mean_end_to_end = lr.mean_end_to_end(i);
        out.push_back(std::move(r));
      }
    }
    ReportRow sum;
    sum.scenario = scenario;
    sum.layer = label;
    sum.strategy = sname;
    sum.pe = "all";
    sum.makespan = lr.makespan;
    sum.rho = rho_accumulated(lr);
    sum.improvement_pct = improvement_pct(
        static_cast<double>(baseline.layers[li].makespan),
        static_cast<double>(lr.makespan));
    out.push_back(std::move(sum));
  }
  ReportRow model;
  model.scenario = scenario;
  model.layer = "model";
  model.strategy = sname;
  model.pe = "all";
  model.makespan = run.model_total();
  model.rho = rho_model(run);
  model.improvement_pct =
      improvement_pct(static_cast<double>(baseline.model_total()),
                      static_cast<double>(run.model_total()));
  out.push_back(std::move(model));
}

}  // namespace

ScenarioResult run_scenario(const ScenarioConfig& cfg, RecorderMode mode,
                            const std::function<void(const TraceEvent&)>& trace) {
  const Topology topo(cfg.topology);
  const StaticLatencyParams sl = cfg.static_params(topo);
  const bool reporting_baseline = cfg.strategy.kind == Strategy::RowMajor;

  ScenarioResult res;
  res.baseline = run_strategy(topo, cfg.sim, cfg.layers,
                              {Strategy::RowMajor, cfg.strategy.window}, sl,
                              reporting_baseline ? mode : RecorderMode::Aggregate,
                              nullptr, reporting_baseline ? trace : nullptr);
  if (!reporting_baseline)
    res.strategy = run_strategy(topo, cfg.sim, cfg.layers, cfg.strategy, sl, mode,
                                &res.baseline, trace);

  append_run_rows(res.rows, cfg.name, res.baseline, res.baseline, true);
  if (res.strategy)
    append_run_rows(res.rows, cfg.name, *res.strategy, res.baseline, true);

  if (mode == RecorderMode::PerTask) {
    const StrategyRun& rep = res.reported();
    for (const LayerRunResult& lr : rep.layers) {
      for (const auto& pe_records : lr.records) {
        for (const TravelRecord& tr : pe_records) {
          RecordRow row;
          row.layer = lr.layer_id;
          row.pe = tr.pe_node;
          row.task = tr.task_id;
          row.t_req = tr.t_req;
          row.t_mem = tr.t_memaccess;
          row.t_resp = tr.t_resp;
          row.t_compu = tr.t_compu;
          row.t_travel = tr.t_travel;
          res.records.push_back(row);
        }
      }
    }
  }
  return res;
}

std::vector<SweepPoint> sweep_points(const ScenarioConfig& cfg) {
  std::vector<SweepPoint> pts;
  const auto strategies_for = [](int window) {
    return std::vector<StrategyChoice>{{Strategy::RowMajor, window},
                                       {Strategy::Distance, window},
                                       {Strategy::StaticLatency, window},
                                       {Strategy::Sampling, window},
                                       {Strategy::PostRun, window}};
  };

  switch (cfg.axis) {
    case SweepAxis::None:
      throw ConfigError("sweep requires a sweep_axis other than 'none'");
    case SweepAxis::OutputChannels:
      for (int ch : {3, 6, 12, 24, 48}) {
        SweepPoint pt;
        pt.label = "channels=" + std::to_string(ch);
        pt.cfg = cfg;
        pt.cfg.layers = {lenet_first_layer(ch)};
        pt.strategies = strategies_for(cfg.strategy.window);
        pts.push_back(std::move(pt));
      }
      break;
    case SweepAxis::KernelSize:
      for (int k : {1, 3, 5, 7, 9, 11, 13}) {
        SweepPoint pt;
        pt.label = "kernel=" + std::to_string(k);
        pt.cfg = cfg;
        /* padding (k-1)/2 keeps the 28x28 output, so the task count is the
         * same at every point and only the packet/compute size moves. */
        pt.cfg.layers = {lenet_first_layer(6, k, (k - 1) / 2)};
        pt.strategies = strategies_for(cfg.strategy.window);
        pts.push_back(std::move(pt));
      }
      break;
    case SweepAxis::Architecture: {
      const std::vector<std::pair<std::string, std::vector<int>>> archs = {
          {"arch=2mc", {9, 10}}, {"arch=4mc", {5, 6, 9, 10}}};
      for (const auto& [label, mcs] : archs) {
        SweepPoint pt;
        pt.label = label;
        pt.cfg = cfg;
        pt.cfg.topology.mc_nodes = mcs;
        pt.strategies = strategies_for(cfg.strategy.window);
        pts.push_back(std::move(pt));
      }
      break;
    }
    case SweepAxis::Window: {
      for (int w : {1, 5, 10}) {
        SweepPoint pt;
        pt.label = "window=" + std::to_string(w);
        pt.cfg = cfg;
        pt.strategies = strategies_for(w);
        pts.push_back(std::move(pt));
      }
      SweepPoint pt;
      pt.label = "window=post-run";
      pt.cfg = cfg;
      pt.strategies = strategies_for(cfg.strategy.window);
      pts.push_back(std::move(pt));
      break;
    }
  }
  return pts;
}

std::vector<ReportRow> run_sweep(const ScenarioConfig& cfg, bool parallel) {
  const std::vector<SweepPoint> pts = sweep_points(cfg);
  std::vector<std::vector<ReportRow>> per_point(pts.size());
  std::vector<std::exception_ptr> errors(pts.size());

  const auto run_point = [&](size_t i) {
    try {
      const SweepPoint& pt = pts[i];
      const Topology topo(pt.cfg.topology);
      const StaticLatencyParams sl = pt.cfg.static_params(topo);
      const StrategyRun base =
          run_strategy(topo, pt.cfg.sim, pt.cfg.layers,
                       {Strategy::RowMajor, cfg.strategy.window}, sl,
                       RecorderMode::Aggregate);
      for (const StrategyChoice& choice : pt.strategies) {
        if (choice.kind == Strategy::RowMajor) {
          append_run_rows(per_point[i], pt.label, base, base, false);
        } else {
          const StrategyRun run =
              run_strategy(topo, pt.cfg.sim, pt.cfg.layers, choice, sl,
                           RecorderMode::Aggregate, &base);
          append_run_rows(per_point[i], pt.label, run, base, false);
        }
      }
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };

#ifdef NOCMAP_HAVE_OPENMP
  if (parallel) {
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(pts.size()); ++i)
      run_point(static_cast<size_t>(i));
  } else {
    for (size_t i = 0; i < pts.size(); ++i) run_point(i);
  }
#else
  (void)parallel;
  for (size_t i = 0; i < pts.size(); ++i) run_point(i);
#endif

  for (const std::exception_ptr& e : errors)
    if (e) std::rethrow_exception(e);

  std::vector<ReportRow> rows;
  for (std::vector<ReportRow>& p : per_point)
    rows.insert(rows.end(), std::make_move_iterator(p.begin()),
                std::make_move_iterator(p.end()));
  return rows;
}

}  // namespace nocmap
