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

#include <vector>

#include "nocmap/common.hpp"

namespace nocmap {

struct UnevennessReport {
  double t_max = 0.0;
  double t_min = 0.0;
  double rho = 0.0;  // (t_max - t_min) / t_max, in [0, 1)
};

/* Unevenness over per-PE latency figures (accumulated or mean end-to-end).
 * Requires at least two values, all positive. */
UnevennessReport unevenness(const std::vector<double>& values);

/* (baseline - candidate) / baseline * 100; negative when the candidate is
 * worse. baseline must be positive. */
double improvement_pct(double baseline, double candidate);

}  // namespace nocmap
