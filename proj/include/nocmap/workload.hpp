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

#include <cstdint>
#include <string>
#include <vector>

#include "nocmap/common.hpp"

namespace nocmap {

/* Activations and weights are 16-bit values. */
inline constexpr std::int64_t kValueBytes = 2;

enum class LayerKind { Conv, Pool, FullyConnected };

/* One network layer. A task computes one output pixel of one output channel
 * (one output neuron for fully connected layers), so every task of a layer
 * moves the same amount of data and runs the same number of MACs.
 *
 * For fully connected layers in_channels is the fan-in and the spatial
 * fields are forced to 1. */
struct LayerSpec {
  LayerKind kind = LayerKind::Conv;
  std::string name;
  int input_h = 1;
  int input_w = 1;
  int in_channels = 1;
  int out_channels = 1;
  int kernel = 1;
  int padding = 0;
  int stride = 1;

  int out_h() const;
  int out_w() const;
  void validate() const;  // throws ConfigError
};

/* Per-task traffic/compute profile, uniform across a layer's tasks. */
struct TaskProfile {
  std::int64_t data_values = 0;  // values fetched from memory per task
  std::int64_t mac_ops = 0;      // multiply-accumulates per task
};

struct Task {
  std::int64_t id = 0;   // dense, 0..tasks_for_layer-1
  int layer = 0;
  std::int64_t data_values = 0;
  std::int64_t mac_ops = 0;
};

/* Flit counts for the three packets a task exchanges with its MC. */
struct PacketSpec {
  int request_flits = 1;
  int response_flits = 1;
  int result_flits = 1;
};

std::int64_t tasks_for_layer(const LayerSpec& layer);
TaskProfile task_profile(const LayerSpec& layer);

/* Flits needed to carry `values` 16-bit values at `payload_bytes` per flit. */
int flits_for_values(std::int64_t values, int payload_bytes);
PacketSpec packet_spec(const LayerSpec& layer, int payload_bytes);

/* PE cycles for one task: ceil(mac_ops / macs_per_cycle). */
std::int64_t compute_cycles(std::int64_t mac_ops, int macs_per_cycle);

std::vector<Task> build_tasks(const LayerSpec& layer, int layer_id);

/* The seven-layer LeNet-style reference model (conv/pool/conv/pool/conv/fc/fc). */
std::vector<LayerSpec> lenet_layers();

/* Just the first (dominant) convolution layer, optionally with a different
 * output-channel count or kernel size; used by the sweep axes. */
LayerSpec lenet_first_layer(int out_channels = 6, int kernel = 5, int padding = 2);

}  // namespace nocmap
