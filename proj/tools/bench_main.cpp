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

#include <chrono>
#include <cstdio>
#include <iostream>

#include "CLI11.hpp"
#include "nocmap/experiments.hpp"

#ifdef NOCMAP_HAVE_OPENMP
#include <omp.h>
#endif

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

}  // namespace

/* Times the sweep runner in serial and OpenMP modes on the same config and
 * verifies the reports are identical. */
int main(int argc, char** argv) {
  CLI::App app{"sweep runner benchmark: serial reference vs OpenMP"};
  std::string config_path;
  app.add_option("--config", config_path,
                 "sweep config (default: kernel-size sweep on the first layer)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    nocmap::ScenarioConfig cfg;
    if (config_path.empty()) {
      cfg.name = "bench";
      cfg.axis = nocmap::SweepAxis::KernelSize;
    } else {
      cfg = nocmap::load_config(config_path);
    }

    const size_t points = nocmap::sweep_points(cfg).size();

    auto t0 = std::chrono::steady_clock::now();
    const std::vector<nocmap::ReportRow> serial_rows = nocmap::run_sweep(cfg, false);
    const double serial_s = seconds_since(t0);

    t0 = std::chrono::steady_clock::now();
    const std::vector<nocmap::ReportRow> parallel_rows = nocmap::run_sweep(cfg, true);
    const double parallel_s = seconds_since(t0);

    const bool identical =
        nocmap::format_report(serial_rows) == nocmap::format_report(parallel_rows);

    int threads = 1;
#ifdef NOCMAP_HAVE_OPENMP
    threads = omp_get_max_threads();
#endif

    std::printf("sweep points:      %zu\n", points);
    std::printf("report rows:       %zu\n", serial_rows.size());
    std::printf("serial:            %.3f s\n", serial_s);
    std::printf("openmp (%2d thr):   %.3f s\n", threads, parallel_s);
    std::printf("speedup:           %.2fx\n",
                parallel_s > 0.0 ? serial_s / parallel_s : 0.0);
    std::printf("outputs identical: %s\n", identical ? "yes" : "no");
    return identical ? 0 : 2;
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
