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
#include <deque>
#include <functional>
#include <unordered_map>
#include <vector>

#include "nocmap/common.hpp"
#include "nocmap/topology.hpp"

namespace nocmap {

struct SimConfig {
  int vc_count = 4;
  int vc_buffer_flits = 4;
  std::int64_t noc_clock_mhz = 2000;
  std::int64_t pe_clock_mhz = 200;
  int macs_per_pe = 64;
  int flit_payload_bytes = 32;
  std::int64_t mem_bandwidth_gb_s = 64;
  std::uint64_t livelock_bound = 1000000;

  /* NoC cycles per PE cycle; must divide evenly. */
  int clock_ratio() const;
  /* Memory service time per 16-bit value, in NoC cycles (exact fraction). */
  Ratio mem_cycles_per_value() const;
  void validate() const;
};

enum class PacketKind : std::uint8_t { Request, Response, Result };
enum class FlitKind : std::uint8_t { Head, Body, Tail, HeadTail };

const char* to_string(PacketKind k);
const char* to_string(FlitKind k);

/* Completed end-to-end packet transfer, reported by Network::step() in the
 * cycle its tail flit reaches the destination node. */
struct DeliveryEvent {
  std::int64_t packet_id = 0;
  PacketKind kind = PacketKind::Request;
  int src = 0;
  int dst = 0;
  int flit_count = 0;
  std::int64_t payload_ref = 0;              // caller tag, e.g. task id
  std::uint64_t head_depart_cycle = 0;       // head flit left the source NI
  std::uint64_t tail_arrive_cycle = 0;       // tail flit reached dst
};

struct TraceEvent {
  std::uint64_t cycle = 0;
  int node = 0;
  const char* event = "";  // inject | arrive | depart | deliver
  std::int64_t packet_id = 0;
  FlitKind flit = FlitKind::Head;
};

/* Cycle-stepped virtual-channel wormhole mesh with X-Y dimension-order
 * routing and credit-based flow control.
 *
 * Timing model, per flit and hop:
 *   - the source NI serializes one flit per cycle into a local-port VC of
 *     its router (subject to a free VC and credit);
 *   - a buffered flit becomes switch-eligible router_delay cycles after the
 *     write, crosses the link in link_delay cycles;
 *   - the final hop ejects into the destination node directly, so an
 *     uncontended f-flit packet over h hops takes
 *     h * (router_delay + link_delay) + (f - 1) cycles.
 *
 * Switch allocation is separable round-robin: each input port nominates one
 * eligible VC (RR over VCs), each output port grants one nominee (RR over
 * input ports); pointers advance only on grant. A VC is allocated to one
 * packet from head until tail and freed when the tail departs downstream,
 * so flits of distinct packets never interleave within a VC. Granted flits
 * free their slot at end of cycle; the credit is usable upstream the next
 * cycle. Everything iterates in fixed node/port/VC order: runs with equal
 * inputs are cycle-for-cycle identical. */
class Network {
 public:
  Network(const Topology& topo, const SimConfig& cfg);

  /* Queue a packet for injection at `at_cycle` (>= now). Packets from one
   * source inject in enqueue order. Returns the assigned packet id. */
  std::int64_t enqueue_injection(PacketKind kind, int src, int dst,
                                 int flit_count, std::int64_t payload_ref,
                                 std::uint64_t at_cycle);

  /* Advance one cycle; returns packets whose tail arrived this cycle. */
  std::vector<DeliveryEvent> step();

  /* Step until idle; throws LivelockError if no flit moves for
   * cfg.livelock_bound cycles. Returns the cycle reached. */
  std::uint64_t drain();

  std::uint64_t now() const { return cycle_; }
  bool idle() const;
  std::uint64_t flits_injected() const { return flits_injected_; }
  std::uint64_t flits_delivered() const { return flits_delivered_; }

  /* Credit conservation and buffer bounds; throws InvariantError. */
  void check_invariants() const;

  void set_trace(std::function<void(const TraceEvent&)> sink) {
    trace_ = std::move(sink);
  }

 private:
  static constexpr int kPortLocal = 0;
  static constexpr int kPortEast = 1;
  static constexpr int kPortWest = 2;
  static constexpr int kPortNorth = 3;
  static constexpr int kPortSouth = 4;
  static constexpr int kPorts = 5;
  static constexpr int kNoVC = -1;
  static constexpr int kEjectVC = -2;
  static constexpr int kFreeOwner = -1;

  struct Flit {
    std::int64_t packet_id = 0;
    FlitKind kind = FlitKind::Head;
    int dst = 0;
  };

  struct BufferedFlit {
    Flit flit;
    std::uint64_t ready_cycle = 0;  // switch-eligible from this cycle on
  };

  struct VirtualChannel {
    std::deque<BufferedFlit> fifo;
    bool active = false;   // holds (part of) a packet, head seen, tail not departed
    int out_port = 0;      // set at head buffering (route is deterministic)
    int out_vc = kNoVC;    // downstream VC, kEjectVC on the final hop
  };

  struct InputPort {
    std::vector<VirtualChannel> vcs;
    int rr_vc = 0;  // last granted VC index
  };

  /* Sender-side ledger of one downstream input port's buffers. owner[v] is
   * kFreeOwner or an opaque tag for the packet holding VC v. */
  struct Downstream {
    std::vector<int> credits;
    std::vector<int> owner;
  };

  struct LinkFlit {
    Flit flit;
    int dest_vc = 0;  // ignored on ejection
    std::uint64_t arrive_cycle = 0;
  };

  struct Router {
    std::vector<InputPort> in;          // kPorts entries
    std::vector<std::deque<LinkFlit>> in_pipe;  // per input port, arrival-ordered
    std::vector<Downstream> out;        // per output port (dir ports only)
    std::vector<int> out_rr;            // per output port: last granted input port
    std::vector<int> neighbor;          // per port, -1 if mesh edge
  };

  struct PendingPacket {
    std::int64_t packet_id = 0;
    PacketKind kind = PacketKind::Request;
    int src = 0;
    int dst = 0;
    int flit_count = 0;
    std::int64_t payload_ref = 0;
  };

  struct SourceNI {
    std::deque<PendingPacket> queue;
    /* (at_cycle, seq)-ordered future injections; moved to queue when due. */
    std::deque<std::pair<std::uint64_t, PendingPacket>> future;
    int flits_sent = 0;
    int alloc_vc = kNoVC;
    Downstream local;  // the router's local input port, owned by this NI
  };

  struct PacketProgress {
    PendingPacket meta;
    std::uint64_t head_depart_cycle = 0;
    int flits_arrived = 0;
  };

  struct PendingCredit {
    int router;  // -1: NI-side (local port of `port_router`)
    int port_router;
    int port;
    int vc;
    bool release_owner;
  };

  static int opposite(int port);
  int next_port(int router, int dst) const;
  void buffer_flit(int router, int port, int vc, const Flit& f);
  void deliver_flit(int node, const Flit& f, std::vector<DeliveryEvent>& out);
  void grant_flit(int router, int port, int vc);
  void trace(int node, const char* event, std::int64_t packet_id, FlitKind kind);

  void phase_arrivals(std::vector<DeliveryEvent>& out);
  void phase_injections(std::vector<DeliveryEvent>& out);
  void phase_vc_allocation();
  void phase_switch_allocation();
  void phase_apply_credits();

  const Topology* topo_;
  SimConfig cfg_;
  std::uint64_t cycle_ = 0;
  std::int64_t next_packet_id_ = 0;
  std::uint64_t enqueue_seq_ = 0;

  std::vector<Router> routers_;
  std::vector<SourceNI> nis_;
  std::vector<PendingCredit> pending_credits_;
  std::unordered_map<std::int64_t, PacketProgress> progress_;

  std::uint64_t flits_in_network_ = 0;
  std::uint64_t flits_injected_ = 0;
  std::uint64_t flits_delivered_ = 0;
  std::uint64_t moves_this_cycle_ = 0;

  std::function<void(const TraceEvent&)> trace_;
};

}  // namespace nocmap
