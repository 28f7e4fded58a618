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

#include "nocmap/workload.hpp"

namespace nocmap {

int LayerSpec::out_h() const {
  if (kind == LayerKind::FullyConnected) return 1;
  return (input_h + 2 * padding - kernel) / stride + 1;
}

int LayerSpec::out_w() const {
  if (kind == LayerKind::FullyConnected) return 1;
  return (input_w + 2 * padding - kernel) / stride + 1;
}

void LayerSpec::validate() const {
  if (in_channels < 1 || out_channels < 1)
    throw ConfigError("layer channel counts must be positive");
  if (kind == LayerKind::FullyConnected) {
    if (input_h != 1 || input_w != 1)
      throw ConfigError("fully connected layers have no spatial extent");
    return;
  }
  if (input_h < 1 || input_w < 1) throw ConfigError("layer input must be nonempty");
  if (kernel < 1 || stride < 1) throw ConfigError("kernel and stride must be positive");
  if (padding < 0) throw ConfigError("padding must be nonnegative");
  if (input_h + 2 * padding < kernel || input_w + 2 * padding < kernel)
    throw ConfigError("kernel larger than padded input");
  if ((input_h + 2 * padding - kernel) % stride != 0 ||
      (input_w + 2 * padding - kernel) % stride != 0)
    throw ConfigError("kernel/stride does not tile the padded input");
}

std::int64_t tasks_for_layer(const LayerSpec& layer) {
  layer.validate();
  if (layer.kind == LayerKind::FullyConnected) return layer.out_channels;
  return static_cast<std::int64_t>(layer.out_channels) * layer.out_h() * layer.out_w();
}

TaskProfile task_profile(const LayerSpec& layer) {
  layer.validate();
  const std::int64_t k2 = static_cast<std::int64_t>(layer.kernel) * layer.kernel;
  switch (layer.kind) {
    case LayerKind::Conv:
      /* One window of activations plus the matching weights, all input channels. */
      return {2 * k2 * layer.in_channels, k2 * layer.in_channels};
    case LayerKind::Pool:
      return {k2, k2};
    case LayerKind::FullyConnected:
      /* Full input vector plus one weight row. */
      return {2 * static_cast<std::int64_t>(layer.in_channels), layer.in_channels};
  }
  throw InvariantError("unknown layer kind");
}

int flits_for_values(std::int64_t values, int payload_bytes) {
  if (values < 1) throw InvariantError("flits_for_values needs at least one value");
  if (payload_bytes < 1) throw ConfigError("flit payload must be positive");
  return static_cast<int>(ceil_div(values * kValueBytes, payload_bytes));
}

PacketSpec packet_spec(const LayerSpec& layer, int payload_bytes) {
  PacketSpec spec;
  spec.response_flits = flits_for_values(task_profile(layer).data_values, payload_bytes);
  return spec;
}

std::int64_t compute_cycles(std::int64_t mac_ops, int macs_per_cycle) {
  if (mac_ops < 1) throw InvariantError("task with no MAC work");
  if (macs_per_cycle < 1) throw ConfigError("macs_per_cycle must be positive");
  return ceil_div(mac_ops, macs_per_cycle);
}

std::vector<Task> build_tasks(const LayerSpec& layer, int layer_id) {
  const std::int64_t n = tasks_for_layer(layer);
  const TaskProfile prof = task_profile(layer);
  std::vector<Task> tasks;
  tasks.reserve(static_cast<size_t>(n));
  for (std::int64_t i = 0; i < n; ++i)
    tasks.push_back({i, layer_id, prof.data_values, prof.mac_ops});
  return tasks;
}

std::vector<LayerSpec> lenet_layers() {
  std::vector<LayerSpec> layers(7);

  layers[0] = {LayerKind::Conv, "C1", 28, 28, 1, 6, 5, 2, 1};
  layers[1] = {LayerKind::Pool, "S2", 28, 28, 6, 6, 2, 0, 2};
  layers[2] = {LayerKind::Conv, "C3", 14, 14, 6, 16, 5, 0, 1};
  layers[3] = {LayerKind::Pool, "S4", 10, 10, 16, 16, 2, 0, 2};
  layers[4] = {LayerKind::Conv, "C5", 5, 5, 16, 120, 5, 0, 1};
  layers[5] = {LayerKind::FullyConnected, "F6", 1, 1, 120, 84, 1, 0, 1};
  layers[6] = {LayerKind::FullyConnected, "OUT", 1, 1, 84, 10, 1, 0, 1};

  for (const LayerSpec& l : layers) l.validate();
  return layers;
}

LayerSpec lenet_first_layer(int out_channels, int kernel, int padding) {
  LayerSpec l{LayerKind::Conv, "C1", 28, 28, 1, out_channels, kernel, padding, 1};
  l.validate();
  return l;
}

}  // namespace nocmap
