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

#include "nocmap/topology.hpp"

#include <algorithm>
#include <cstdlib>

namespace nocmap {

Topology::Topology(const TopologyConfig& cfg) : cfg_(cfg) {
  if (cfg_.width < 1 || cfg_.height < 1)
    throw ConfigError("mesh dimensions must be positive");
  if (cfg_.link_delay < 1 || cfg_.router_delay < 1)
    throw ConfigError("link and router delays must be >= 1 cycle");
  const int n = node_count();
  if (cfg_.mc_nodes.empty())
    throw ConfigError("at least one memory controller node is required");

  roles_.assign(n, NodeRole::PE);
  for (int mc : cfg_.mc_nodes) {
    if (mc < 0 || mc >= n)
      throw ConfigError("mc node id out of range");
    if (roles_[mc] == NodeRole::MC)
      throw ConfigError("duplicate mc node id");
    roles_[mc] = NodeRole::MC;
  }
  if (static_cast<int>(cfg_.mc_nodes.size()) == n)
    throw ConfigError("topology has no PE nodes");

  mcs_ = cfg_.mc_nodes;
  std::sort(mcs_.begin(), mcs_.end());
  for (int id = 0; id < n; ++id)
    if (roles_[id] == NodeRole::PE) pes_.push_back(id);

  classes_.reserve(pes_.size());
  for (int pe : pes_) {
    DistanceClass dc;
    dc.pe_node = pe;
    dc.mc_node = nearest_mc(pe);
    dc.distance = manhattan(pe, dc.mc_node);
    classes_.push_back(dc);
  }
}

NodeCoord Topology::coord_of(int node) const {
  if (node < 0 || node >= node_count())
    throw InvariantError("node id out of range");
  return {node % cfg_.width, node / cfg_.width};
}

int Topology::node_at(NodeCoord c) const {
  if (c.x < 0 || c.x >= cfg_.width || c.y < 0 || c.y >= cfg_.height)
    throw InvariantError("coordinate outside mesh");
  return c.y * cfg_.width + c.x;
}

NodeRole Topology::role_of(int node) const {
  if (node < 0 || node >= node_count())
    throw InvariantError("node id out of range");
  return roles_[node];
}

int Topology::manhattan(int a, int b) const {
  const NodeCoord ca = coord_of(a), cb = coord_of(b);
  return std::abs(ca.x - cb.x) + std::abs(ca.y - cb.y);
}

int Topology::nearest_mc(int pe_node) const {
  if (role_of(pe_node) != NodeRole::PE)
    throw InvariantError("nearest_mc expects a PE node");
  int best = -1, best_d = 0;
  for (int mc : mcs_) {  // ascending id, so ties keep the lower id
    const int d = manhattan(pe_node, mc);
    if (best < 0 || d < best_d) {
      best = mc;
      best_d = d;
    }
  }
  return best;
}

std::vector<int> Topology::xy_route(int src, int dst) const {
  NodeCoord cur = coord_of(src);
  const NodeCoord end = coord_of(dst);
  std::vector<int> route;
  route.reserve(static_cast<size_t>(manhattan(src, dst)) + 1);
  route.push_back(src);
  while (cur.x != end.x) {
    cur.x += (end.x > cur.x) ? 1 : -1;
    route.push_back(node_at(cur));
  }
  while (cur.y != end.y) {
    cur.y += (end.y > cur.y) ? 1 : -1;
    route.push_back(node_at(cur));
  }
  return route;
}

}  // namespace nocmap
