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

#include "nocmap/metrics.hpp"

#include <algorithm>

namespace nocmap {

UnevennessReport unevenness(const std::vector<double>& values) {
  if (values.size() < 2)
    throw InvariantError("unevenness needs at least two PE latencies");
  for (double v : values)
    if (v <= 0.0) throw InvariantError("unevenness requires positive latencies");
  UnevennessReport r;
  r.t_max = *std::max_element(values.begin(), values.end());
  r.t_min = *std::min_element(values.begin(), values.end());
  r.rho = (r.t_max - r.t_min) / r.t_max;
  return r;
}

double improvement_pct(double baseline, double candidate) {
  if (baseline <= 0.0) throw InvariantError("improvement needs a positive baseline");
  return (baseline - candidate) / baseline * 100.0;
}

}  // namespace nocmap
