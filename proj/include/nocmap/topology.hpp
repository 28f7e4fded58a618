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

enum class NodeRole { PE, MC };

struct NodeCoord {
  int x = 0;  // column, 0 at the west edge
  int y = 0;  // row, 0 at the north edge
  friend bool operator==(const NodeCoord&, const NodeCoord&) = default;
};

struct TopologyConfig {
  int width = 4;
  int height = 4;
  std::vector<int> mc_nodes = {9, 10};
  int link_delay = 1;
  int router_delay = 1;
};

/* Per-PE shortest-path distance to its serving (nearest) memory controller. */
struct DistanceClass {
  int pe_node = 0;
  int mc_node = 0;
  int distance = 0;  // Manhattan hops, >= 1 (an MC never shares a node with a PE)
};

/* 2D mesh with X-Y dimension-order routing. Node ids are row-major:
 * id = y * width + x. A node is either a PE or a memory controller. */
class Topology {
 public:
  explicit Topology(const TopologyConfig& cfg);

  int width() const { return cfg_.width; }
  int height() const { return cfg_.height; }
  int node_count() const { return cfg_.width * cfg_.height; }
  int link_delay() const { return cfg_.link_delay; }
  int router_delay() const { return cfg_.router_delay; }

  NodeCoord coord_of(int node) const;
  int node_at(NodeCoord c) const;
  NodeRole role_of(int node) const;

  /* PE and MC ids in ascending node-id order. */
  const std::vector<int>& pe_nodes() const { return pes_; }
  const std::vector<int>& mc_nodes() const { return mcs_; }

  int manhattan(int a, int b) const;

  /* Nearest MC for a PE; distance ties resolve to the lower MC node id. */
  int nearest_mc(int pe_node) const;

  /* One entry per PE, ascending PE node id. */
  const std::vector<DistanceClass>& distance_classes() const { return classes_; }

  /* Full X-Y route as node ids, src and dst inclusive. X first, then Y;
   * length is always manhattan(src, dst) + 1. */
  std::vector<int> xy_route(int src, int dst) const;

 private:
  TopologyConfig cfg_;
  std::vector<NodeRole> roles_;
  std::vector<int> pes_;
  std::vector<int> mcs_;
  std::vector<DistanceClass> classes_;
};

}  // namespace nocmap
