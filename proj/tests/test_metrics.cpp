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

#include "doctest.h"
#include "nocmap/metrics.hpp"

using namespace nocmap;

TEST_CASE("unevenness of per-PE latencies") {
  const UnevennessReport r = unevenness({77.88, 57.69});
  CHECK(r.t_max == doctest::Approx(77.88));
  CHECK(r.t_min == doctest::Approx(57.69));
  CHECK(r.rho == doctest::Approx(0.259245).epsilon(1e-5));

  CHECK(unevenness({5.0, 5.0, 5.0}).rho == doctest::Approx(0.0));
  CHECK(unevenness({10.0, 5.0, 7.5}).rho == doctest::Approx(0.5));
  CHECK(unevenness({1.0, 100.0}).rho == doctest::Approx(0.99));
}

TEST_CASE("unevenness domain") {
  CHECK_THROWS_AS(unevenness({1.0}), InvariantError);
  CHECK_THROWS_AS(unevenness({}), InvariantError);
  CHECK_THROWS_AS(unevenness({3.0, 0.0}), InvariantError);
  CHECK_THROWS_AS(unevenness({3.0, -1.0}), InvariantError);
}

TEST_CASE("improvement percentage") {
  CHECK(improvement_pct(200.0, 150.0) == doctest::Approx(25.0));
  CHECK(improvement_pct(100.0, 100.0) == doctest::Approx(0.0));
  CHECK(improvement_pct(100.0, 110.0) == doctest::Approx(-10.0));
  CHECK_THROWS_AS(improvement_pct(0.0, 5.0), InvariantError);
  CHECK_THROWS_AS(improvement_pct(-2.0, 5.0), InvariantError);
}
