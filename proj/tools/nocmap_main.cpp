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

#include <fstream>
#include <iostream>
#include <memory>

#include "CLI11.hpp"
#include "nocmap/experiments.hpp"

namespace {

int run_command(const std::string& config_path, const std::string& out_override,
                const std::string& records_path, const std::string& trace_path) {
  nocmap::ScenarioConfig cfg = nocmap::load_config(config_path);
  if (!out_override.empty()) cfg.output = out_override;

  const nocmap::RecorderMode mode = records_path.empty()
                                        ? nocmap::RecorderMode::Aggregate
                                        : nocmap::RecorderMode::PerTask;

  std::function<void(const nocmap::TraceEvent&)> sink;
  auto trace_file = std::make_shared<std::ofstream>();
  if (!trace_path.empty()) {
    trace_file->open(trace_path, std::ios::binary);
    if (!*trace_file)
      throw nocmap::ConfigError("cannot open trace file '" + trace_path + "'");
    *trace_file << "cycle,node,event,packet_id,flit_kind\n";
    sink = [trace_file](const nocmap::TraceEvent& ev) {
      *trace_file << ev.cycle << ',' << ev.node << ',' << ev.event << ','
                  << ev.packet_id << ',' << nocmap::to_string(ev.flit) << '\n';
    };
  }

  const nocmap::ScenarioResult res = nocmap::run_scenario(cfg, mode, sink);
  nocmap::write_report(cfg.output, res.rows);
  std::cout << "wrote " << cfg.output << " (" << res.rows.size() << " rows)\n";

  if (!records_path.empty()) {
    std::ofstream rec(records_path, std::ios::binary);
    if (!rec)
      throw nocmap::ConfigError("cannot open records file '" + records_path + "'");
    rec << nocmap::format_records(res.records);
    std::cout << "wrote " << records_path << " (" << res.records.size()
              << " records)\n";
  }
  if (!trace_path.empty()) std::cout << "wrote " << trace_path << "\n";
  return 0;
}

int sweep_command(const std::string& config_path, const std::string& out_override,
                  bool serial) {
  nocmap::ScenarioConfig cfg = nocmap::load_config(config_path);
  if (!out_override.empty()) cfg.output = out_override;
  const std::vector<nocmap::ReportRow> rows = nocmap::run_sweep(cfg, !serial);
  nocmap::write_report(cfg.output, rows);
  std::cout << "wrote " << cfg.output << " (" << rows.size() << " rows)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cycle-stepped mesh NoC DNN accelerator mapping simulator"};
  app.require_subcommand(1);

  std::string config_path, out_override, records_path, trace_path;
  bool serial = false;

  CLI::App* run = app.add_subcommand("run", "simulate one scenario");
  run->add_option("--config", config_path, "JSON scenario config")->required();
  run->add_option("--out", out_override, "override the report output path");
  run->add_option("--dump-records", records_path,
                  "write per-task travel records to this CSV");
  run->add_option("--trace", trace_path, "write the flit event trace to this CSV");

  CLI::App* sweep = app.add_subcommand("sweep", "run the configured sweep axis");
  sweep->add_option("--config", config_path, "JSON scenario config")->required();
  sweep->add_option("--out", out_override, "override the report output path");
  sweep->add_flag("--serial", serial, "run sweep points one at a time");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (run->parsed())
      return run_command(config_path, out_override, records_path, trace_path);
    return sweep_command(config_path, out_override, serial);
  } catch (const nocmap::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const nocmap::InvariantError& e) {
    std::cerr << "invariant violated: " << e.what() << "\n";
    return 2;
  } catch (const nocmap::LivelockError& e) {
    std::cerr << "livelock: " << e.what() << "\n";
    return 3;
  }
}
