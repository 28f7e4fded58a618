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

#include "nocmap/noc.hpp"

#include <cassert>

namespace nocmap {

int SimConfig::clock_ratio() const {
  if (pe_clock_mhz <= 0 || noc_clock_mhz <= 0)
    throw ConfigError("clock frequencies must be positive");
  if (noc_clock_mhz % pe_clock_mhz != 0)
    throw ConfigError("NoC clock must be an integer multiple of the PE clock");
  return static_cast<int>(noc_clock_mhz / pe_clock_mhz);
}

Ratio SimConfig::mem_cycles_per_value() const {
  if (mem_bandwidth_gb_s <= 0) throw ConfigError("memory bandwidth must be positive");
  /* cycles/value = (noc_mhz * 1e6) / (bw * 1e9 / kValueBytes); kValueBytes = 2. */
  return Ratio(noc_clock_mhz, 500 * mem_bandwidth_gb_s);
}

void SimConfig::validate() const {
  if (vc_count < 1) throw ConfigError("vc_count must be >= 1");
  if (vc_buffer_flits < 1) throw ConfigError("vc_buffer_flits must be >= 1");
  if (macs_per_pe < 1) throw ConfigError("macs_per_pe must be >= 1");
  if (flit_payload_bytes < 1) throw ConfigError("flit payload must be >= 1 byte");
  if (livelock_bound < 1) throw ConfigError("livelock bound must be >= 1");
  (void)clock_ratio();
  (void)mem_cycles_per_value();
}

const char* to_string(PacketKind k) {
  switch (k) {
    case PacketKind::Request: return "request";
    case PacketKind::Response: return "response";
    case PacketKind::Result: return "result";
  }
  return "?";
}

const char* to_string(FlitKind k) {
  switch (k) {
    case FlitKind::Head: return "head";
    case FlitKind::Body: return "body";
    case FlitKind::Tail: return "tail";
    case FlitKind::HeadTail: return "head_tail";
  }
  return "?";
}

Network::Network(const Topology& topo, const SimConfig& cfg)
    : topo_(&topo), cfg_(cfg) {
  cfg_.validate();
  const int n = topo_->node_count();
  const int w = topo_->width();
  routers_.resize(static_cast<size_t>(n));
  nis_.resize(static_cast<size_t>(n));
  for (int id = 0; id < n; ++id) {
    Router& r = routers_[static_cast<size_t>(id)];
    const NodeCoord c = topo_->coord_of(id);
    r.neighbor.assign(kPorts, -1);
    r.neighbor[kPortEast] = (c.x + 1 < w) ? id + 1 : -1;
    r.neighbor[kPortWest] = (c.x > 0) ? id - 1 : -1;
    r.neighbor[kPortNorth] = (c.y > 0) ? id - w : -1;
    r.neighbor[kPortSouth] = (c.y + 1 < topo_->height()) ? id + w : -1;

    r.in.resize(kPorts);
    r.in_pipe.resize(kPorts);
    r.out.resize(kPorts);
    r.out_rr.assign(kPorts, kPorts - 1);  // first grant search starts at port 0
    for (int p = 0; p < kPorts; ++p) {
      r.in[p].vcs.resize(static_cast<size_t>(cfg_.vc_count));
      r.in[p].rr_vc = cfg_.vc_count - 1;  // first nomination starts at VC 0
      if (p != kPortLocal && r.neighbor[p] >= 0) {
        r.out[p].credits.assign(static_cast<size_t>(cfg_.vc_count),
                                cfg_.vc_buffer_flits);
        r.out[p].owner.assign(static_cast<size_t>(cfg_.vc_count), kFreeOwner);
      }
    }
    nis_[static_cast<size_t>(id)].local.credits.assign(
        static_cast<size_t>(cfg_.vc_count), cfg_.vc_buffer_flits);
    nis_[static_cast<size_t>(id)].local.owner.assign(
        static_cast<size_t>(cfg_.vc_count), kFreeOwner);
  }
}

int Network::opposite(int port) {
  switch (port) {
    case kPortEast: return kPortWest;
    case kPortWest: return kPortEast;
    case kPortNorth: return kPortSouth;
    case kPortSouth: return kPortNorth;
  }
  throw InvariantError("local port has no opposite");
}

/* X before Y; caller guarantees router != dst. */
int Network::next_port(int router, int dst) const {
  const NodeCoord a = topo_->coord_of(router);
  const NodeCoord b = topo_->coord_of(dst);
  if (b.x > a.x) return kPortEast;
  if (b.x < a.x) return kPortWest;
  if (b.y > a.y) return kPortSouth;
  if (b.y < a.y) return kPortNorth;
  throw InvariantError("routing a flit that is already at its destination");
}

void Network::trace(int node, const char* event, std::int64_t packet_id,
                    FlitKind kind) {
  if (trace_) trace_({cycle_, node, event, packet_id, kind});
}

std::int64_t Network::enqueue_injection(PacketKind kind, int src, int dst,
                                        int flit_count, std::int64_t payload_ref,
                                        std::uint64_t at_cycle) {
  if (src < 0 || src >= topo_->node_count() || dst < 0 ||
      dst >= topo_->node_count())
    throw InvariantError("packet endpoint out of range");
  if (flit_count < 1) throw InvariantError("packet needs at least one flit");
  if (at_cycle < cycle_) throw InvariantError("injection scheduled in the past");

  PendingPacket p;
  p.packet_id = next_packet_id_++;
  p.kind = kind;
  p.src = src;
  p.dst = dst;
  p.flit_count = flit_count;
  p.payload_ref = payload_ref;
  nis_[static_cast<size_t>(src)].future.emplace_back(at_cycle, p);
  ++enqueue_seq_;
  return p.packet_id;
}

void Network::buffer_flit(int router, int port, int vc, const Flit& f) {
  VirtualChannel& ch = routers_[static_cast<size_t>(router)].in[port].vcs[static_cast<size_t>(vc)];
  if (static_cast<int>(ch.fifo.size()) >= cfg_.vc_buffer_flits)
    throw InvariantError("VC buffer overflow: credit protocol breached");
  if (f.kind == FlitKind::Head || f.kind == FlitKind::HeadTail) {
    if (ch.active) throw InvariantError("head flit into an occupied VC");
    ch.active = true;
    ch.out_port = next_port(router, f.dst);
    ch.out_vc = kNoVC;
  }
  ch.fifo.push_back({f, cycle_ + static_cast<std::uint64_t>(topo_->router_delay())});
}

void Network::deliver_flit(int node, const Flit& f, std::vector<DeliveryEvent>& out) {
  ++flits_delivered_;
  ++moves_this_cycle_;
  trace(node, "deliver", f.packet_id, f.kind);
  auto it = progress_.find(f.packet_id);
  if (it == progress_.end()) throw InvariantError("delivery for unknown packet");
  PacketProgress& pr = it->second;
  ++pr.flits_arrived;
  if (f.kind == FlitKind::Tail || f.kind == FlitKind::HeadTail) {
    if (pr.flits_arrived != pr.meta.flit_count)
      throw InvariantError("tail delivered before all payload flits");
    DeliveryEvent ev;
    ev.packet_id = pr.meta.packet_id;
    ev.kind = pr.meta.kind;
    ev.src = pr.meta.src;
    ev.dst = pr.meta.dst;
    ev.flit_count = pr.meta.flit_count;
    ev.payload_ref = pr.meta.payload_ref;
    ev.head_depart_cycle = pr.head_depart_cycle;
    ev.tail_arrive_cycle = cycle_;
    out.push_back(ev);
    progress_.erase(it);
  }
}

void Network::grant_flit(int router, int port, int vc) {
  Router& r = routers_[static_cast<size_t>(router)];
  VirtualChannel& ch = r.in[port].vcs[static_cast<size_t>(vc)];
  const BufferedFlit bf = ch.fifo.front();
  ch.fifo.pop_front();
  ++moves_this_cycle_;
  trace(router, "depart", bf.flit.packet_id, bf.flit.kind);

  const int op = ch.out_port;
  const int dest = r.neighbor[op];
  if (dest < 0) throw InvariantError("granted flit would leave the mesh");
  if (ch.out_vc >= 0) {
    int& credit = r.out[op].credits[static_cast<size_t>(ch.out_vc)];
    if (credit <= 0) throw InvariantError("grant without downstream credit");
    --credit;
  }
  routers_[static_cast<size_t>(dest)].in_pipe[opposite(op)].push_back(
      {bf.flit, ch.out_vc,
       cycle_ + static_cast<std::uint64_t>(topo_->link_delay())});

  const bool is_tail =
      bf.flit.kind == FlitKind::Tail || bf.flit.kind == FlitKind::HeadTail;
  PendingCredit pc;
  if (port == kPortLocal) {
    pc.router = -1;
    pc.port_router = router;
  } else {
    pc.router = r.neighbor[port];
    pc.port_router = router;
    if (pc.router < 0) throw InvariantError("buffered flit on an edge port");
  }
  pc.port = port;
  pc.vc = vc;
  pc.release_owner = is_tail;
  pending_credits_.push_back(pc);

  if (is_tail) {
    ch.active = false;
    ch.out_vc = kNoVC;
  }
}

void Network::phase_arrivals(std::vector<DeliveryEvent>& out) {
  for (size_t id = 0; id < routers_.size(); ++id) {
    Router& r = routers_[id];
    for (int p = kPortEast; p < kPorts; ++p) {
      std::deque<LinkFlit>& pipe = r.in_pipe[p];
      while (!pipe.empty() && pipe.front().arrive_cycle == cycle_) {
        const LinkFlit lf = pipe.front();
        pipe.pop_front();
        if (lf.flit.dst == static_cast<int>(id)) {
          if (lf.dest_vc != kEjectVC)
            throw InvariantError("flit reached destination with a buffered VC");
          --flits_in_network_;
          deliver_flit(static_cast<int>(id), lf.flit, out);
        } else {
          if (lf.dest_vc < 0)
            throw InvariantError("transit flit without an allocated VC");
          trace(static_cast<int>(id), "arrive", lf.flit.packet_id, lf.flit.kind);
          ++moves_this_cycle_;
          buffer_flit(static_cast<int>(id), p, lf.dest_vc, lf.flit);
        }
      }
      if (!pipe.empty() && pipe.front().arrive_cycle < cycle_)
        throw InvariantError("link flit missed its arrival cycle");
    }
  }
}

void Network::phase_injections(std::vector<DeliveryEvent>& out) {
  for (size_t node = 0; node < nis_.size(); ++node) {
    SourceNI& ni = nis_[node];

    /* Promote due future injections, preserving enqueue order. */
    for (size_t i = 0; i < ni.future.size();) {
      if (ni.future[i].first <= cycle_) {
        ni.queue.push_back(ni.future[i].second);
        ni.future.erase(ni.future.begin() + static_cast<std::ptrdiff_t>(i));
      } else {
        ++i;
      }
    }

    if (ni.queue.empty()) continue;
    const PendingPacket& pkt = ni.queue.front();

    const int seq = ni.flits_sent;
    FlitKind kind;
    if (pkt.flit_count == 1)
      kind = FlitKind::HeadTail;
    else if (seq == 0)
      kind = FlitKind::Head;
    else if (seq == pkt.flit_count - 1)
      kind = FlitKind::Tail;
    else
      kind = FlitKind::Body;

    if (pkt.src == pkt.dst) {
      /* Local delivery bypasses the fabric but keeps NI serialization:
       * one flit per cycle, tail lands flit_count - 1 cycles after head. */
      if (seq == 0) progress_[pkt.packet_id] = {pkt, cycle_, 0};
      ++flits_injected_;
      ++moves_this_cycle_;
      trace(static_cast<int>(node), "inject", pkt.packet_id, kind);
      Flit f{pkt.packet_id, kind, pkt.dst};
      deliver_flit(static_cast<int>(node), f, out);
      ++ni.flits_sent;
      if (ni.flits_sent == pkt.flit_count) {
        ni.queue.pop_front();
        ni.flits_sent = 0;
      }
      continue;
    }

    if (ni.alloc_vc == kNoVC) {
      for (int v = 0; v < cfg_.vc_count; ++v) {
        if (ni.local.owner[static_cast<size_t>(v)] == kFreeOwner) {
          ni.alloc_vc = v;
          ni.local.owner[static_cast<size_t>(v)] = 0;
          break;
        }
      }
      if (ni.alloc_vc == kNoVC) continue;  // all local VCs held, stall
    }
    int& credit = ni.local.credits[static_cast<size_t>(ni.alloc_vc)];
    if (credit <= 0) continue;  // local buffer full, stall
    --credit;

    if (seq == 0) progress_[pkt.packet_id] = {pkt, cycle_, 0};
    Flit f{pkt.packet_id, kind, pkt.dst};
    buffer_flit(static_cast<int>(node), kPortLocal, ni.alloc_vc, f);
    ++flits_injected_;
    ++flits_in_network_;
    ++moves_this_cycle_;
    trace(static_cast<int>(node), "inject", pkt.packet_id, kind);

    ++ni.flits_sent;
    if (ni.flits_sent == pkt.flit_count) {
      ni.queue.pop_front();
      ni.flits_sent = 0;
      ni.alloc_vc = kNoVC;  // ownership is released when the tail departs
    }
  }
}

void Network::phase_vc_allocation() {
  for (size_t id = 0; id < routers_.size(); ++id) {
    Router& r = routers_[id];
    for (int p = 0; p < kPorts; ++p) {
      for (int v = 0; v < cfg_.vc_count; ++v) {
        VirtualChannel& ch = r.in[p].vcs[static_cast<size_t>(v)];
        if (!ch.active || ch.out_vc != kNoVC || ch.fifo.empty()) continue;
        const Flit& head = ch.fifo.front().flit;
        if (head.kind != FlitKind::Head && head.kind != FlitKind::HeadTail)
          throw InvariantError("unallocated VC fronted by a payload flit");
        const int dest = r.neighbor[ch.out_port];
        if (dest < 0) throw InvariantError("route points off the mesh");
        if (dest == head.dst) {
          ch.out_vc = kEjectVC;  // final hop ejects on arrival, no credit
          continue;
        }
        Downstream& ds = r.out[ch.out_port];
        for (int w = 0; w < cfg_.vc_count; ++w) {
          if (ds.owner[static_cast<size_t>(w)] == kFreeOwner) {
            ds.owner[static_cast<size_t>(w)] = p * cfg_.vc_count + v;
            ch.out_vc = w;
            break;
          }
        }
      }
    }
  }
}

void Network::phase_switch_allocation() {
  std::vector<int> nominee(kPorts);
  for (size_t id = 0; id < routers_.size(); ++id) {
    Router& r = routers_[id];

    /* Stage 1: each input port nominates one eligible VC, RR over VCs. */
    for (int p = 0; p < kPorts; ++p) {
      nominee[p] = -1;
      const int start = (r.in[p].rr_vc + 1) % cfg_.vc_count;
      for (int k = 0; k < cfg_.vc_count; ++k) {
        const int v = (start + k) % cfg_.vc_count;
        const VirtualChannel& ch = r.in[p].vcs[static_cast<size_t>(v)];
        if (!ch.active || ch.fifo.empty()) continue;
        if (ch.fifo.front().ready_cycle > cycle_) continue;
        if (ch.out_vc == kNoVC) continue;
        if (ch.out_vc >= 0 &&
            r.out[ch.out_port].credits[static_cast<size_t>(ch.out_vc)] <= 0)
          continue;
        nominee[p] = v;
        break;
      }
    }

    /* Stage 2: each output port grants one nominee, RR over input ports. */
    for (int op = kPortEast; op < kPorts; ++op) {
      if (r.neighbor[op] < 0) continue;
      const int start = (r.out_rr[op] + 1) % kPorts;
      for (int k = 0; k < kPorts; ++k) {
        const int p = (start + k) % kPorts;
        if (nominee[p] < 0) continue;
        if (r.in[p].vcs[static_cast<size_t>(nominee[p])].out_port != op) continue;
        const int v = nominee[p];
        grant_flit(static_cast<int>(id), p, v);
        r.out_rr[op] = p;
        r.in[p].rr_vc = v;
        nominee[p] = -1;
        break;
      }
    }
  }
}

void Network::phase_apply_credits() {
  for (const PendingCredit& pc : pending_credits_) {
    Downstream& ds = (pc.router < 0)
                         ? nis_[static_cast<size_t>(pc.port_router)].local
                         : routers_[static_cast<size_t>(pc.router)]
                               .out[opposite(pc.port)];
    int& credit = ds.credits[static_cast<size_t>(pc.vc)];
    ++credit;
    if (credit > cfg_.vc_buffer_flits)
      throw InvariantError("credit overflow: more returns than buffer slots");
    if (pc.release_owner) ds.owner[static_cast<size_t>(pc.vc)] = kFreeOwner;
  }
  pending_credits_.clear();
}

std::vector<DeliveryEvent> Network::step() {
  moves_this_cycle_ = 0;
  std::vector<DeliveryEvent> out;
  phase_arrivals(out);
  phase_injections(out);
  phase_vc_allocation();
  phase_switch_allocation();
  phase_apply_credits();
  ++cycle_;
  return out;
}

bool Network::idle() const {
  if (flits_in_network_ != 0) return false;
  for (const SourceNI& ni : nis_)
    if (!ni.queue.empty() || !ni.future.empty()) return false;
  return true;
}

std::uint64_t Network::drain() {
  std::uint64_t stalled = 0;
  while (!idle()) {
    step();
    if (moves_this_cycle_ == 0) {
      if (++stalled >= cfg_.livelock_bound)
        throw LivelockError("no flit movement for " +
                            std::to_string(cfg_.livelock_bound) + " cycles");
    } else {
      stalled = 0;
    }
  }
  return cycle_;
}

void Network::check_invariants() const {
  const int cap = cfg_.vc_buffer_flits;
  for (size_t id = 0; id < routers_.size(); ++id) {
    const Router& r = routers_[id];
    for (int p = 0; p < kPorts; ++p)
      for (int v = 0; v < cfg_.vc_count; ++v)
        if (static_cast<int>(r.in[p].vcs[static_cast<size_t>(v)].fifo.size()) > cap)
          throw InvariantError("VC occupancy above buffer capacity");

    /* Sender-side credits + flits on the wire + receiver occupancy must
     * account for every slot of the downstream buffer. */
    for (int op = kPortEast; op < kPorts; ++op) {
      const int nbr = r.neighbor[op];
      if (nbr < 0) continue;
      const Router& d = routers_[static_cast<size_t>(nbr)];
      const int back = opposite(op);
      for (int v = 0; v < cfg_.vc_count; ++v) {
        int inflight = 0;
        for (const LinkFlit& lf : d.in_pipe[back])
          if (lf.dest_vc == v) ++inflight;
        const int occ =
            static_cast<int>(d.in[back].vcs[static_cast<size_t>(v)].fifo.size());
        if (r.out[op].credits[static_cast<size_t>(v)] + inflight + occ != cap)
          throw InvariantError("credit conservation violated on a link");
        if (r.out[op].owner[static_cast<size_t>(v)] == kFreeOwner &&
            (occ != 0 || inflight != 0 ||
             d.in[back].vcs[static_cast<size_t>(v)].active))
          throw InvariantError("free downstream VC is not empty");
      }
    }
  }
  for (size_t node = 0; node < nis_.size(); ++node) {
    const SourceNI& ni = nis_[node];
    for (int v = 0; v < cfg_.vc_count; ++v) {
      const int occ = static_cast<int>(
          routers_[node].in[kPortLocal].vcs[static_cast<size_t>(v)].fifo.size());
      if (ni.local.credits[static_cast<size_t>(v)] + occ != cap)
        throw InvariantError("credit conservation violated at an NI");
    }
  }

  std::uint64_t total = 0;
  for (const Router& r : routers_) {
    for (int p = 0; p < kPorts; ++p) {
      total += r.in_pipe[p].size();
      for (int v = 0; v < cfg_.vc_count; ++v)
        total += r.in[p].vcs[static_cast<size_t>(v)].fifo.size();
    }
  }
  if (total != flits_in_network_)
    throw InvariantError("flit conservation violated: ledger out of sync");
}

}  // namespace nocmap
