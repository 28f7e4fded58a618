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

#include <map>

#include "doctest.h"
#include "nocmap/workload.hpp"

using namespace nocmap;

TEST_CASE("reference model layer task counts") {
  const std::vector<LayerSpec> layers = lenet_layers();
  REQUIRE(layers.size() == 7);
  const std::vector<std::int64_t> want = {4704, 1176, 1600, 400, 120, 84, 10};
  std::int64_t sum = 0;
  for (size_t i = 0; i < layers.size(); ++i) {
    CHECK(tasks_for_layer(layers[i]) == want[i]);
    sum += tasks_for_layer(layers[i]);
  }
  CHECK(sum == 8094);
}

TEST_CASE("reference model output sizes") {
  const auto layers = lenet_layers();
  CHECK(layers[0].out_h() == 28);  // 5x5 kernel, padding 2
  CHECK(layers[1].out_h() == 14);  // 2x2 pool, stride 2
  CHECK(layers[2].out_h() == 10);  // 5x5 on 14x14, no padding
  CHECK(layers[3].out_h() == 5);
  CHECK(layers[4].out_h() == 1);   // 5x5 on 5x5
  CHECK(layers[5].out_h() == 1);
}

TEST_CASE("per-task data and MAC profile") {
  const auto layers = lenet_layers();
  /* conv: 2*K^2*in_ch values (window + weights), K^2*in_ch MACs */
  CHECK(task_profile(layers[0]).data_values == 50);
  CHECK(task_profile(layers[0]).mac_ops == 25);
  CHECK(task_profile(layers[2]).data_values == 300);
  CHECK(task_profile(layers[2]).mac_ops == 150);
  CHECK(task_profile(layers[4]).data_values == 800);
  /* pool: K^2 */
  CHECK(task_profile(layers[1]).data_values == 4);
  CHECK(task_profile(layers[3]).mac_ops == 4);
  /* fc: 2*fan_in values, fan_in MACs */
  CHECK(task_profile(layers[5]).data_values == 240);
  CHECK(task_profile(layers[5]).mac_ops == 120);
  CHECK(task_profile(layers[6]).data_values == 168);
}

TEST_CASE("response flit count vs kernel size, 32-byte payload") {
  const std::map<int, int> want = {{1, 1}, {3, 2},  {5, 4},  {7, 7},
                                   {9, 11}, {11, 16}, {13, 22}};
  for (const auto& [k, flits] : want) {
    const LayerSpec layer = lenet_first_layer(6, k, (k - 1) / 2);
    CHECK(tasks_for_layer(layer) == 4704);  // padding keeps 28x28 output
    CHECK(packet_spec(layer, 32).response_flits == flits);
    CHECK(packet_spec(layer, 32).request_flits == 1);
    CHECK(packet_spec(layer, 32).result_flits == 1);
  }
}

TEST_CASE("response flit counts across the reference model") {
  const auto layers = lenet_layers();
  const std::vector<int> want = {4, 1, 19, 1, 50, 15, 11};
  for (size_t i = 0; i < layers.size(); ++i)
    CHECK(packet_spec(layers[i], 32).response_flits == want[i]);
}

TEST_CASE("output channel scaling of the first layer") {
  CHECK(tasks_for_layer(lenet_first_layer(3)) == 2352);
  CHECK(tasks_for_layer(lenet_first_layer(6)) == 4704);
  CHECK(tasks_for_layer(lenet_first_layer(12)) == 9408);
  CHECK(tasks_for_layer(lenet_first_layer(24)) == 18816);
  CHECK(tasks_for_layer(lenet_first_layer(48)) == 37632);
}

TEST_CASE("flits_for_values boundaries and monotonicity") {
  CHECK(flits_for_values(16, 32) == 1);  // 32 bytes exactly
  CHECK(flits_for_values(17, 32) == 2);
  CHECK(flits_for_values(1, 32) == 1);
  CHECK(flits_for_values(160, 32) == 10);
  int prev = 0;
  for (std::int64_t v = 1; v <= 600; ++v) {
    const int f = flits_for_values(v, 32);
    CHECK(f >= prev);
    CHECK(f == (2 * v + 31) / 32);
    prev = f;
  }
  CHECK_THROWS_AS(flits_for_values(0, 32), InvariantError);
  CHECK_THROWS_AS(flits_for_values(8, 0), ConfigError);
}

TEST_CASE("compute cycles round up") {
  CHECK(compute_cycles(25, 64) == 1);
  CHECK(compute_cycles(64, 64) == 1);
  CHECK(compute_cycles(65, 64) == 2);
  CHECK(compute_cycles(128, 64) == 2);
  CHECK(compute_cycles(150, 64) == 3);
  CHECK_THROWS_AS(compute_cycles(0, 64), InvariantError);
  CHECK_THROWS_AS(compute_cycles(10, 0), ConfigError);
}

TEST_CASE("build_tasks is dense and uniform") {
  const LayerSpec layer = lenet_layers()[2];
  const auto tasks = build_tasks(layer, 3);
  REQUIRE(tasks.size() == 1600);
  for (size_t i = 0; i < tasks.size(); ++i) {
    CHECK(tasks[i].id == static_cast<std::int64_t>(i));
    CHECK(tasks[i].layer == 3);
    CHECK(tasks[i].data_values == 300);
    CHECK(tasks[i].mac_ops == 150);
  }
}

TEST_CASE("layer validation rejects inconsistent shapes") {
  LayerSpec bad{LayerKind::Conv, "x", 4, 4, 1, 1, 5, 0, 1};
  CHECK_THROWS_AS(bad.validate(), ConfigError);  // kernel > input

  LayerSpec stride{LayerKind::Conv, "x", 5, 5, 1, 1, 2, 0, 2};
  CHECK_THROWS_AS(stride.validate(), ConfigError);  // does not tile

  LayerSpec fc{LayerKind::FullyConnected, "x", 2, 1, 8, 4, 1, 0, 1};
  CHECK_THROWS_AS(fc.validate(), ConfigError);  // fc with spatial extent

  LayerSpec chan{LayerKind::Conv, "x", 4, 4, 0, 1, 2, 0, 2};
  CHECK_THROWS_AS(chan.validate(), ConfigError);
}
