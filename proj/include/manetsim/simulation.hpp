#pragma once

#include "manetsim/adversary.hpp"
#include "manetsim/aodv.hpp"
#include "manetsim/engine.hpp"
#include "manetsim/ids.hpp"
#include "manetsim/mobility.hpp"
#include "manetsim/packet.hpp"
#include "manetsim/rng.hpp"
#include "manetsim/scenario.hpp"
#include "manetsim/trace.hpp"

#include <algorithm>
#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace manetsim {

inline constexpr int kIfqCapacity = 50;
inline constexpr double kRtoInitial = 1.0;
inline constexpr int kTcpMaxRetries = 5;
inline constexpr double kStallRetryDelay = 5.0; // s before a stalled sender re-probes

struct RunStats {
    std::uint64_t executed_events = 0;
    std::uint64_t originated_data = 0;
    std::uint64_t delivered_data = 0;
    std::uint64_t dropped = 0;
    std::uint64_t floods_sent = 0;
    std::uint64_t floods_accepted = 0;
    std::uint64_t infection_removals = 0;
    std::uint64_t congested_checks = 0; // overloaded queues with no junk inside
    struct Block {
        NodeId ids_node;
        NodeId blocked;
        SimTime at;
        BlockReason reason;
    };
    std::vector<Block> blocks;
};

enum class LoadCheckOutcome { OutOfRange, BelowLoad, Congested, Purged };

struct LoadCheckResult {
    LoadCheckOutcome outcome;
    int purged = 0;
};

// One full scenario run: nodes, medium, protocol state machines, attacker and
// defender overlays, all driven by the event engine and logged to the trace.
class Simulation {
  public:
    Simulation(ScenarioConfig cfg, std::ostream& trace_out, bool dump_positions = false)
        : cfg_(std::move(cfg)), rng_(cfg_.seed), writer_(trace_out), dump_positions_(dump_positions),
          world_(make_world()) {
        init_nodes();
    }

    RunStats run() {
        const SimTime t0 = SimTime::from_seconds(cfg_.t0);
        const SimTime t_end = t0 + SimTime::from_seconds(cfg_.duration);
        engine_.run_until(t0);
        schedule_mobility(t0, t_end);
        schedule_traffic(t0);
        schedule_floods(t0, t_end);
        schedule_ids_sweeps(t0, t_end);
        for (const ScriptedMove& mv : scripted_moves_)
            engine_.schedule(mv.at, [this, mv] { world_.set_position(mv.node, mv.pos); });
        stats_.executed_events = engine_.run_until(t_end);
        writer_.flush();
        return stats_;
    }

    // --- read-only access for tests and reporting ---
    SimTime now() const { return engine_.now(); }
    const RoutingTable& routing_table(NodeId n) const { return node(n).aodv.rtable; }
    Position position(NodeId n) const { return world_.position(n); }
    const std::set<NodeId>& blocklist(NodeId n) const { return node(n).blocklist; }
    const IdsNodeState& ids_state(NodeId n) const { return node(n).ids; }
    const SelfishNodeState& selfish_state(NodeId n) const { return node(n).selfish; }
    const RunStats& stats() const { return stats_; }
    std::size_t queue_depth(NodeId n) const { return node(n).queue.size(); }
    const ScenarioConfig& config() const { return cfg_; }

    // Scripted-topology hooks (tests and debugging): park a node somewhere,
    // now or at a point during the run.
    void set_node_position(NodeId n, Position p) { world_.set_position(n, p); }

    void script_position(SimTime at, NodeId n, Position p) {
        scripted_moves_.push_back({at, n, p});
    }

    // The weak-node check, callable directly: purges parked flood packets
    // from an overloaded in-range node and blames their senders.
    LoadCheckResult check_weak_node_load(NodeId ids_node, NodeId target) {
        NodeRuntime& me = node(ids_node);
        if (me.role != Role::Ids) throw SimError("check_weak_node_load: not an IDS node");
        if (!in_range(world_.position(ids_node), world_.position(target), cfg_.radio))
            return {LoadCheckOutcome::OutOfRange, 0};
        NodeRuntime& t = node(target);
        double occupancy = static_cast<double>(t.queue.size()) / kIfqCapacity;
        if (occupancy <= cfg_.ids.normal_load) return {LoadCheckOutcome::BelowLoad, 0};
        std::vector<Packet> purged;
        std::deque<QueueEntry> kept;
        for (auto& qe : t.queue) {
            if (qe.junk)
                purged.push_back(qe.pkt);
            else
                kept.push_back(std::move(qe));
        }
        if (purged.empty()) {
            ++stats_.congested_checks;
            return {LoadCheckOutcome::Congested, 0};
        }
        t.queue = std::move(kept);
        std::set<NodeId> culprits;
        for (const Packet& p : purged) {
            log(p, 'b', target, reason::blocked_sender);
            culprits.insert(p.src);
        }
        me.ids.infection_removals += purged.size();
        stats_.infection_removals += purged.size();
        for (NodeId c : culprits)
            if (!me.ids.blocked.count(c)) ids_block(ids_node, c, BlockReason::LoadInfection);
        return {LoadCheckOutcome::Purged, static_cast<int>(purged.size())};
    }

  private:
    // ------------------------------------------------------------------ state
    struct QueueEntry {
        Packet pkt;
        bool junk = false; // parked FalseFlood payloads
    };

    struct PendingDiscovery {
        int retries_left = 0;
        EventHandle timer = 0;
    };

    struct NodeRuntime {
        Role role = Role::Normal;
        AodvNodeState aodv;
        std::deque<QueueEntry> queue;
        std::set<NodeId> blocklist;
        std::set<std::pair<NodeId, std::uint32_t>> seen_alerts;
        std::map<NodeId, PendingDiscovery> pending;
        SelfishNodeState selfish;
        IdsNodeState ids;
    };

    struct TcpConnState {
        std::uint32_t next_seq = 1;
        std::optional<std::uint32_t> unacked;
        int retries = 0;
        double rto = kRtoInitial;
        SimTime last_data_at{};
        EventHandle rto_timer = 0;
        bool timer_armed = false;
        bool stalled = false;
        std::uint32_t sink_expected = 1; // next sequence the sink will deliver
    };

    struct ScriptedMove {
        SimTime at;
        NodeId node;
        Position pos;
    };

    ScenarioConfig cfg_;
    Rng rng_;
    SimEngine engine_;
    TraceWriter writer_;
    bool dump_positions_;
    MobilityWorld world_;
    std::vector<NodeRuntime> nodes_;
    std::vector<TcpConnState> tcp_;
    std::vector<ScriptedMove> scripted_moves_;
    RunStats stats_;
    std::uint64_t next_pkt_id_ = 1;

    NodeRuntime& node(NodeId n) { return nodes_.at(static_cast<std::size_t>(n)); }
    const NodeRuntime& node(NodeId n) const { return nodes_.at(static_cast<std::size_t>(n)); }

    // ------------------------------------------------------------------ setup
    MobilityWorld make_world() const {
        return MobilityWorld(cfg_.area_width, cfg_.area_height, cfg_.mobility);
    }

    void init_nodes() {
        std::vector<Position> layout;
        if (cfg_.placement == Placement::Grid) {
            layout = grid_positions(cfg_.node_count, cfg_.area_width, cfg_.area_height);
        } else {
            RngStream s = rng_.stream("placement");
            for (int i = 0; i < cfg_.node_count; ++i)
                layout.push_back({s.uniform(0.0, cfg_.area_width), s.uniform(0.0, cfg_.area_height)});
        }
        for (const auto& [id, pos] : cfg_.positions)
            layout.at(static_cast<std::size_t>(id)) = pos;
        nodes_.resize(static_cast<std::size_t>(cfg_.node_count));
        for (int i = 0; i < cfg_.node_count; ++i) {
            world_.add_node(layout[static_cast<std::size_t>(i)],
                            rng_.stream("mobility", static_cast<std::uint64_t>(i)));
            nodes_[static_cast<std::size_t>(i)].role = cfg_.role_of(i);
        }
        tcp_.resize(cfg_.traffic.size());
    }

    void schedule_mobility(SimTime t0, SimTime t_end) {
        if (!world_.moving() && !dump_positions_) return;
        const SimTime step = SimTime::from_seconds(cfg_.mobility.update_interval);
        for (SimTime t = t0 + step; t <= t_end; t += step) {
            engine_.schedule(t, [this] {
                if (world_.moving()) world_.step_all(cfg_.mobility.update_interval);
                if (dump_positions_) dump_all_positions();
            });
        }
    }

    void dump_all_positions() {
        for (NodeId n = 0; n < cfg_.node_count; ++n) {
            Position p = world_.position(n);
            char buf[48];
            std::snprintf(buf, sizeof(buf), "%.2f:%.2f", p.x, p.y);
            TraceRecord rec;
            rec.time = engine_.now();
            rec.action = 'm';
            rec.node = n;
            rec.kind = "Pos";
            rec.pkt_id = 0;
            rec.size = 0;
            rec.src = n;
            rec.dst = n;
            rec.reason = buf;
            writer_.log(rec);
        }
    }

    void schedule_traffic(SimTime t0) {
        for (std::size_t i = 0; i < cfg_.traffic.size(); ++i) {
            const Connection& c = cfg_.traffic[i];
            SimTime start = std::max(t0, SimTime::from_seconds(c.start_at));
            if (c.kind == ConnKind::CbrUdp)
                engine_.schedule(start, [this, i] { cbr_tick(i); });
            else
                engine_.schedule(start, [this, i] { tcp_send_current(i, false); });
        }
    }

    void schedule_floods(SimTime t0, SimTime t_end) {
        if (!cfg_.adversary.flood || cfg_.selfish.empty()) return;
        const SimTime window = SimTime::from_seconds(cfg_.adversary.flood_window);
        SimTime start = std::max(t0, SimTime::from_seconds(cfg_.adversary.flood_start));
        for (NodeId s : cfg_.selfish)
            for (SimTime t = start; t < t_end; t += window)
                engine_.schedule(t, [this, s] { flood_burst(s); });
    }

    void schedule_ids_sweeps(SimTime t0, SimTime t_end) {
        if (cfg_.ids_nodes.empty()) return;
        const SimTime window = SimTime::from_seconds(cfg_.ids.window_len);
        for (NodeId i : cfg_.ids_nodes)
            for (SimTime t = t0 + window; t <= t_end; t += window)
                engine_.schedule(t, [this, i] { ids_load_sweep(i); });
    }

    // ------------------------------------------------------------------ trace
    void log(const Packet& pkt, char action, NodeId at, std::string_view why = reason::none) {
        TraceRecord rec;
        rec.time = engine_.now();
        rec.action = action;
        rec.node = at;
        rec.kind = std::string(kind_token(pkt.kind));
        rec.pkt_id = pkt.id;
        rec.size = pkt.size;
        rec.src = pkt.src;
        rec.dst = pkt.dst;
        rec.reason = std::string(why);
        writer_.log(rec);
        if (action == 'd' || action == 'b') ++stats_.dropped;
    }

    // ----------------------------------------------------------------- medium
    SimTime latency(int size_bytes, bool immediate) const {
        double wire = static_cast<double>(size_bytes) * 8.0 / cfg_.bandwidth_bps;
        return SimTime::from_seconds(immediate ? wire : wire + cfg_.proc_delay);
    }

    void transmit_unicast(NodeId from, NodeId to, Packet pkt, bool immediate = false) {
        SimTime lat = latency(pkt.size, immediate);
        engine_.schedule(engine_.now() + lat, [this, from, to, pkt] {
            if (!in_range(world_.position(from), world_.position(to), cfg_.radio))
                link_break(from, to, pkt);
            else
                deliver(to, from, pkt);
        });
        observe_hook(from, pkt, lat);
    }

    void transmit_broadcast(NodeId from, const Packet& pkt) {
        SimTime lat = latency(pkt.size, false);
        for (NodeId nb : world_.neighbors(from, cfg_.radio)) {
            Packet copy = pkt;
            engine_.schedule(engine_.now() + lat, [this, nb, from, copy] { deliver(nb, from, copy); });
        }
        observe_hook(from, pkt, lat);
    }

    // Promiscuous sensing: every transmission inside an IDS node's radio
    // range reaches its monitor, whoever it was addressed to.
    void observe_hook(NodeId from, const Packet& pkt, SimTime lat) {
        for (NodeId i : cfg_.ids_nodes) {
            if (i == from) continue;
            if (!in_range(world_.position(i), world_.position(from), cfg_.radio)) continue;
            Packet copy = pkt;
            engine_.schedule(engine_.now() + lat, [this, i, from, copy] { ids_observe(i, from, copy); });
        }
    }

    void deliver(NodeId to, NodeId from, const Packet& pkt) {
        NodeRuntime& n = node(to);
        if (n.blocklist.count(from)) {
            log(pkt, 'b', to, reason::blocked_sender);
            return;
        }
        if (n.role == Role::Selfish) {
            selfish_handle(to, from, pkt);
            return;
        }
        switch (pkt.kind) {
            case PacketKind::Rreq: aodv_handle_rreq(to, from, pkt); break;
            case PacketKind::Rrep: aodv_handle_rrep(to, from, pkt); break;
            case PacketKind::Rerr: aodv_handle_rerr(to, from, pkt); break;
            case PacketKind::DataUdp:
            case PacketKind::DataTcp:
            case PacketKind::TcpAck: handle_data(to, from, pkt); break;
            case PacketKind::FalseFlood: accept_junk(to, from, pkt); break;
            case PacketKind::IdsAlert: handle_alert(to, from, pkt); break;
        }
    }

    // ------------------------------------------------------------------- aodv
    SimTime route_expiry() const {
        return engine_.now() + SimTime::from_seconds(cfg_.aodv.route_lifetime);
    }

    bool maybe_install(NodeId at, NodeId dest, NodeId via, std::uint32_t seq, std::uint32_t hops,
                       NodeId vouched_by) {
        if (dest == at) return false;
        NodeRuntime& n = node(at);
        if (n.blocklist.count(via) || n.blocklist.count(vouched_by)) return false;
        bool changed = n.aodv.rtable.update(dest, via, seq, hops, route_expiry(), vouched_by);
        if (changed) route_installed(at, dest);
        return changed;
    }

    void aodv_handle_rreq(NodeId at, NodeId from, const Packet& pkt) {
        const auto& m = std::get<RreqMessage>(pkt.body);
        NodeRuntime& n = node(at);
        if (n.aodv.flood_seen(m.origin, m.broadcast_id, engine_.now(), cfg_.aodv.dedup_lifetime))
            return; // duplicate flood copy
        log(pkt, 'r', at);
        maybe_install(at, m.origin, from, m.origin_seq, m.hop_count + 1, m.origin);
        if (at == m.destination) {
            n.aodv.own_seq += 1;
            send_rrep(at, m.origin, at, n.aodv.own_seq, 0);
            return;
        }
        const RoutingTableEntry* cached = n.aodv.rtable.find(m.destination);
        if (cached && cached->valid && cached->expires_at >= engine_.now() && cached->seq_known &&
            cached->dest_seq_no >= m.dest_seq_known) {
            send_rrep(at, m.origin, m.destination, cached->dest_seq_no, cached->hop_count);
            return;
        }
        if (pkt.ttl <= 1) {
            log(pkt, 'd', at, reason::ttl_expired);
            return;
        }
        Packet fwd = pkt;
        auto& fm = std::get<RreqMessage>(fwd.body);
        fm.hop_count += 1;
        fwd.ttl -= 1;
        log(fwd, 'f', at);
        transmit_broadcast(at, fwd);
    }

    void send_rrep(NodeId at, NodeId to_origin, NodeId dest, std::uint32_t seq, std::uint32_t hops) {
        auto nh = node(at).aodv.rtable.lookup(to_origin, engine_.now());
        if (!nh) return; // reverse route just vanished; the origin will retry
        RrepMessage rep;
        rep.destination = dest;
        rep.dest_seq_no = seq;
        rep.hop_count = hops;
        rep.origin = to_origin;
        rep.lifetime = cfg_.aodv.route_lifetime;
        Packet pkt;
        pkt.kind = PacketKind::Rrep;
        pkt.id = next_pkt_id_++;
        pkt.size = kRrepSize;
        pkt.src = at;
        pkt.dst = to_origin;
        pkt.body = rep;
        log(pkt, 's', at);
        node(at).aodv.rtable.refresh(to_origin, route_expiry());
        transmit_unicast(at, *nh, pkt);
    }

    void aodv_handle_rrep(NodeId at, NodeId from, const Packet& pkt) {
        const auto& m = std::get<RrepMessage>(pkt.body);
        // a reply claiming this node as its own destination is nonsense to
        // relay: whoever wants a route here can be answered directly
        if (at == m.destination && at != m.origin) return;
        maybe_install(at, m.destination, from, m.dest_seq_no, m.hop_count + 1, pkt.src);
        if (at == m.origin) {
            log(pkt, 'r', at);
            return;
        }
        auto nh = node(at).aodv.rtable.lookup(m.origin, engine_.now());
        if (!nh) {
            log(pkt, 'd', at, reason::no_route);
            return;
        }
        if (pkt.ttl <= 1) {
            log(pkt, 'd', at, reason::ttl_expired);
            return;
        }
        Packet fwd = pkt;
        auto& fm = std::get<RrepMessage>(fwd.body);
        fm.hop_count += 1;
        fwd.ttl -= 1;
        log(fwd, 'f', at);
        node(at).aodv.rtable.refresh(m.origin, route_expiry());
        transmit_unicast(at, *nh, fwd);
    }

    void aodv_handle_rerr(NodeId at, NodeId from, const Packet& pkt) {
        const auto& m = std::get<RerrMessage>(pkt.body);
        log(pkt, 'r', at);
        NodeRuntime& n = node(at);
        RerrMessage mine;
        for (const auto& [dest, seq] : m.unreachable) {
            const RoutingTableEntry* e = n.aodv.rtable.find(dest);
            if (e && e->valid && e->next_hop == from) {
                n.aodv.rtable.note_seq(dest, seq);
                n.aodv.rtable.invalidate(dest);
                mine.unreachable.emplace_back(dest, seq);
            }
        }
        if (!mine.unreachable.empty()) {
            send_rerr(at, std::move(mine));
            recover_queued(at);
        }
    }

    void send_rerr(NodeId at, RerrMessage m) {
        Packet pkt;
        pkt.kind = PacketKind::Rerr;
        pkt.id = next_pkt_id_++;
        pkt.size = kRerrSize + 8 * static_cast<int>(m.unreachable.size() - 1);
        pkt.src = at;
        pkt.dst = kBroadcast;
        pkt.body = std::move(m);
        log(pkt, 's', at);
        transmit_broadcast(at, pkt);
    }

    // A transmission whose receiver was out of range at delivery time: the
    // packet is lost, every route through that hop dies, neighbors are told.
    void link_break(NodeId at, NodeId dead, const Packet& pkt) {
        log(pkt, 'd', at, reason::rerr_invalidated);
        NodeRuntime& n = node(at);
        if (n.role == Role::Selfish) return; // attacker keeps no routing state
        auto affected = n.aodv.rtable.routes_via(dead);
        if (affected.empty()) return;
        RerrMessage m;
        for (const auto& [dest, seq] : affected) {
            n.aodv.rtable.invalidate(dest);
            m.unreachable.emplace_back(dest, seq);
        }
        send_rerr(at, std::move(m));
        recover_queued(at);
    }

    // Restart discovery for any queued destination that lost its route.
    void recover_queued(NodeId at) {
        NodeRuntime& n = node(at);
        std::set<NodeId> dests;
        for (const QueueEntry& qe : n.queue)
            if (!qe.junk) dests.insert(qe.pkt.dst);
        for (NodeId d : dests)
            if (!n.aodv.rtable.lookup(d, engine_.now())) ensure_discovery(at, d);
    }

    // -------------------------------------------------------------- discovery
    void ensure_discovery(NodeId at, NodeId dest) {
        NodeRuntime& n = node(at);
        if (n.pending.count(dest)) return;
        PendingDiscovery p;
        p.retries_left = cfg_.aodv.rreq_retries;
        n.pending[dest] = p;
        send_rreq(at, dest);
        arm_discovery_timer(at, dest);
    }

    void arm_discovery_timer(NodeId at, NodeId dest) {
        auto& p = node(at).pending[dest];
        p.timer = engine_.schedule(engine_.now() + SimTime::from_seconds(cfg_.aodv.discovery_timeout),
                                   [this, at, dest] { discovery_timeout(at, dest); });
    }

    void send_rreq(NodeId at, NodeId dest) {
        NodeRuntime& n = node(at);
        n.aodv.own_seq += 1;
        std::uint32_t bcast = n.aodv.next_broadcast_id++;
        RreqMessage m;
        m.origin = at;
        m.origin_seq = n.aodv.own_seq;
        m.broadcast_id = bcast;
        m.destination = dest;
        const RoutingTableEntry* e = n.aodv.rtable.find(dest);
        m.dest_seq_known = (e && e->seq_known) ? e->dest_seq_no : 0;
        m.hop_count = 0;
        n.aodv.flood_seen(at, bcast, engine_.now(), cfg_.aodv.dedup_lifetime);
        Packet pkt;
        pkt.kind = PacketKind::Rreq;
        pkt.id = next_pkt_id_++;
        pkt.size = kRreqSize;
        pkt.src = at;
        pkt.dst = kBroadcast;
        pkt.body = m;
        log(pkt, 's', at);
        transmit_broadcast(at, pkt);
    }

    void discovery_timeout(NodeId at, NodeId dest) {
        NodeRuntime& n = node(at);
        auto it = n.pending.find(dest);
        if (it == n.pending.end()) return;
        if (n.aodv.rtable.lookup(dest, engine_.now())) { // installed meanwhile
            n.pending.erase(it);
            return;
        }
        if (it->second.retries_left-- > 0) {
            send_rreq(at, dest);
            arm_discovery_timer(at, dest);
            return;
        }
        n.pending.erase(it);
        destination_unreachable(at, dest);
    }

    void destination_unreachable(NodeId at, NodeId dest) {
        NodeRuntime& n = node(at);
        // repeated failure with a freshness demand nobody can meet: start over
        n.aodv.rtable.forget(dest);
        std::deque<QueueEntry> kept;
        for (auto& qe : n.queue) {
            if (!qe.junk && qe.pkt.dst == dest)
                log(qe.pkt, 'd', at, reason::no_route);
            else
                kept.push_back(std::move(qe));
        }
        n.queue = std::move(kept);
        for (std::size_t i = 0; i < cfg_.traffic.size(); ++i) {
            const Connection& c = cfg_.traffic[i];
            if (c.kind != ConnKind::Tcp || c.source != at || c.sink != dest) continue;
            if (!tcp_[i].stalled) continue;
            SimTime retry = engine_.now() + SimTime::from_seconds(kStallRetryDelay);
            if (retry.seconds() < c.stop_at)
                engine_.schedule(retry, [this, i] { tcp_reprobe(i); });
        }
    }

    void route_installed(NodeId at, NodeId dest) {
        NodeRuntime& n = node(at);
        if (auto it = n.pending.find(dest); it != n.pending.end()) {
            engine_.cancel(it->second.timer);
            n.pending.erase(it);
        }
        // flush queued packets now that they can move
        std::deque<QueueEntry> kept;
        std::vector<Packet> ready;
        for (auto& qe : n.queue) {
            if (!qe.junk && qe.pkt.dst == dest)
                ready.push_back(std::move(qe.pkt));
            else
                kept.push_back(std::move(qe));
        }
        n.queue = std::move(kept);
        for (Packet& p : ready) dispatch_from_origin(at, std::move(p));
        // revive stalled senders waiting for this destination
        for (std::size_t i = 0; i < cfg_.traffic.size(); ++i) {
            const Connection& c = cfg_.traffic[i];
            if (c.kind == ConnKind::Tcp && c.source == at && c.sink == dest && tcp_[i].stalled)
                tcp_revive(i);
        }
    }

    // ---------------------------------------------------------------- traffic
    Packet make_data_packet(PacketKind kind, const Connection& c, std::uint32_t conn_id,
                            std::uint32_t seq) {
        Packet pkt;
        pkt.kind = kind;
        pkt.id = next_pkt_id_++;
        pkt.size = kind == PacketKind::TcpAck ? kAckSize : c.packet_size;
        pkt.src = kind == PacketKind::TcpAck ? c.sink : c.source;
        pkt.dst = kind == PacketKind::TcpAck ? c.source : c.sink;
        if (kind == PacketKind::DataUdp)
            pkt.body = UdpInfo{conn_id};
        else
            pkt.body = TcpInfo{conn_id, seq};
        return pkt;
    }

    // Origin-side send: route it, or buffer it and go looking for a route.
    void dispatch_from_origin(NodeId at, Packet pkt) {
        NodeRuntime& n = node(at);
        NodeId dest = pkt.dst;
        if (auto nh = n.aodv.rtable.lookup(dest, engine_.now())) {
            n.aodv.rtable.refresh(dest, route_expiry());
            transmit_unicast(at, *nh, std::move(pkt));
            return;
        }
        enqueue(at, std::move(pkt), false);
        ensure_discovery(at, dest);
    }

    void enqueue(NodeId at, Packet pkt, bool junk) {
        NodeRuntime& n = node(at);
        if (n.queue.size() >= kIfqCapacity) {
            log(n.queue.front().pkt, 'd', at, reason::ifq_full);
            n.queue.pop_front();
        }
        n.queue.push_back(QueueEntry{std::move(pkt), junk});
    }

    void cbr_tick(std::size_t conn_idx) {
        const Connection& c = cfg_.traffic[conn_idx];
        if (engine_.now().seconds() >= c.stop_at) return;
        Packet pkt = make_data_packet(PacketKind::DataUdp, c, static_cast<std::uint32_t>(conn_idx), 0);
        log(pkt, 's', c.source);
        ++stats_.originated_data;
        dispatch_from_origin(c.source, std::move(pkt));
        SimTime next = engine_.now() + SimTime::from_seconds(1.0 / c.rate);
        if (next.seconds() < c.stop_at)
            engine_.schedule(next, [this, conn_idx] { cbr_tick(conn_idx); });
    }

    // Sends (or re-sends) the current stop-and-wait sequence number.
    void tcp_send_current(std::size_t conn_idx, bool retransmit) {
        const Connection& c = cfg_.traffic[conn_idx];
        TcpConnState& st = tcp_[conn_idx];
        if (!retransmit && engine_.now().seconds() >= c.stop_at) return;
        st.unacked = st.next_seq;
        st.last_data_at = engine_.now();
        Packet pkt =
            make_data_packet(PacketKind::DataTcp, c, static_cast<std::uint32_t>(conn_idx), st.next_seq);
        log(pkt, 's', c.source);
        ++stats_.originated_data;
        dispatch_from_origin(c.source, std::move(pkt));
        st.rto_timer = engine_.schedule(engine_.now() + SimTime::from_seconds(st.rto),
                                        [this, conn_idx] { tcp_rto(conn_idx); });
        st.timer_armed = true;
    }

    void tcp_rto(std::size_t conn_idx) {
        TcpConnState& st = tcp_[conn_idx];
        st.timer_armed = false;
        if (!st.unacked || st.stalled) return;
        if (st.retries < kTcpMaxRetries) {
            ++st.retries;
            st.rto *= 2.0;
            tcp_send_current(conn_idx, true);
            return;
        }
        // the path is dead as far as this sender can tell: tear the route
        // down and go hunting for a fresh one
        const Connection& c = cfg_.traffic[conn_idx];
        st.stalled = true;
        node(c.source).aodv.rtable.invalidate(c.sink);
        ensure_discovery(c.source, c.sink);
    }

    void tcp_revive(std::size_t conn_idx) {
        TcpConnState& st = tcp_[conn_idx];
        if (!st.stalled) return;
        st.stalled = false;
        st.retries = 0;
        st.rto = kRtoInitial;
        if (st.unacked) tcp_send_current(conn_idx, true);
    }

    void tcp_reprobe(std::size_t conn_idx) {
        const Connection& c = cfg_.traffic[conn_idx];
        TcpConnState& st = tcp_[conn_idx];
        if (!st.stalled || engine_.now().seconds() >= c.stop_at) return;
        if (node(c.source).aodv.rtable.lookup(c.sink, engine_.now())) {
            tcp_revive(conn_idx);
            return;
        }
        ensure_discovery(c.source, c.sink);
        SimTime retry = engine_.now() + SimTime::from_seconds(kStallRetryDelay);
        if (retry.seconds() < c.stop_at)
            engine_.schedule(retry, [this, conn_idx] { tcp_reprobe(conn_idx); });
    }

    void tcp_data_at_sink(std::size_t conn_idx, std::uint32_t seq) {
        const Connection& c = cfg_.traffic[conn_idx];
        TcpConnState& st = tcp_[conn_idx];
        if (seq >= st.sink_expected) st.sink_expected = seq + 1; // deliver once
        Packet ack = make_data_packet(PacketKind::TcpAck, c, static_cast<std::uint32_t>(conn_idx), seq);
        log(ack, 's', c.sink);
        dispatch_from_origin(c.sink, std::move(ack));
    }

    void tcp_ack_at_source(std::size_t conn_idx, std::uint32_t seq) {
        const Connection& c = cfg_.traffic[conn_idx];
        TcpConnState& st = tcp_[conn_idx];
        if (!st.unacked || *st.unacked != seq) return; // stale or duplicate ack
        if (st.timer_armed) {
            engine_.cancel(st.rto_timer);
            st.timer_armed = false;
        }
        st.unacked.reset();
        st.retries = 0;
        st.rto = kRtoInitial;
        st.next_seq = seq + 1;
        if (engine_.now().seconds() >= c.stop_at) return;
        SimTime next = std::max(engine_.now(), st.last_data_at + SimTime::from_seconds(1.0 / c.rate));
        engine_.schedule(next, [this, conn_idx] {
            TcpConnState& s = tcp_[conn_idx];
            if (!s.unacked && !s.stalled) tcp_send_current(conn_idx, false);
        });
    }

    void handle_data(NodeId at, NodeId from, const Packet& pkt) {
        (void)from;
        if (at == pkt.dst) {
            log(pkt, 'r', at);
            if (is_data_kind(pkt.kind)) ++stats_.delivered_data;
            if (pkt.kind == PacketKind::DataTcp) {
                const auto& t = std::get<TcpInfo>(pkt.body);
                tcp_data_at_sink(t.conn_id, t.seq);
            } else if (pkt.kind == PacketKind::TcpAck) {
                const auto& t = std::get<TcpInfo>(pkt.body);
                tcp_ack_at_source(t.conn_id, t.seq);
            }
            return;
        }
        NodeRuntime& n = node(at);
        if (pkt.ttl <= 1) {
            log(pkt, 'd', at, reason::ttl_expired);
            return;
        }
        if (auto nh = n.aodv.rtable.lookup(pkt.dst, engine_.now())) {
            n.aodv.rtable.refresh(pkt.dst, route_expiry());
            Packet fwd = pkt;
            fwd.ttl -= 1;
            log(fwd, 'f', at);
            transmit_unicast(at, *nh, std::move(fwd));
            return;
        }
        // relay with no route: report the hole so upstream re-discovers
        log(pkt, 'd', at, reason::no_route);
        const RoutingTableEntry* e = n.aodv.rtable.find(pkt.dst);
        RerrMessage m;
        m.unreachable.emplace_back(pkt.dst, e && e->seq_known ? e->dest_seq_no : 0);
        send_rerr(at, std::move(m));
    }

    // -------------------------------------------------------------- adversary
    void selfish_handle(NodeId at, NodeId from, const Packet& pkt) {
        NodeRuntime& n = node(at);
        switch (pkt.kind) {
            case PacketKind::Rreq: {
                const auto& m = std::get<RreqMessage>(pkt.body);
                log(pkt, 'r', at);
                n.selfish.note_seq(m.origin, m.origin_seq);
                RrepMessage rep = forge_rrep(n.selfish, m, cfg_.adversary, cfg_.aodv.route_lifetime);
                Packet fake;
                fake.kind = PacketKind::Rrep;
                fake.id = next_pkt_id_++;
                fake.size = kRrepSize;
                fake.src = at;
                fake.dst = m.origin;
                fake.body = rep;
                log(fake, 's', at);
                transmit_unicast(at, from, fake, /*immediate=*/true);
                break;
            }
            case PacketKind::Rrep: {
                const auto& m = std::get<RrepMessage>(pkt.body);
                n.selfish.note_seq(m.destination, m.dest_seq_no);
                log(pkt, 'd', at, reason::selfish_drop);
                break;
            }
            case PacketKind::Rerr: {
                for (const auto& [d, s] : std::get<RerrMessage>(pkt.body).unreachable)
                    n.selfish.note_seq(d, s);
                log(pkt, 'd', at, reason::selfish_drop);
                break;
            }
            case PacketKind::DataTcp:
            case PacketKind::TcpAck: log(pkt, 'd', at, reason::selfish_block_tcp); break;
            case PacketKind::DataUdp: log(pkt, 'd', at, reason::selfish_capture_udp); break;
            case PacketKind::FalseFlood:
            case PacketKind::IdsAlert: log(pkt, 'd', at, reason::selfish_drop); break;
        }
    }

    void flood_burst(NodeId at) {
        NodeRuntime& n = node(at);
        int burst = flood_burst_size(cfg_.adversary, static_cast<int>(cfg_.selfish.size()));
        for (int i = 0; i < burst; ++i) {
            Packet pkt;
            pkt.kind = PacketKind::FalseFlood;
            pkt.id = next_pkt_id_++;
            pkt.size = kFloodSize;
            pkt.src = at;
            pkt.dst = kBroadcast;
            if (i == 0) {
                // the burst leads with a shortest-route lie that relays
                // network-wide; everything else is one-hop volume
                FalseRouteAdvert adv;
                adv.attacker = at;
                adv.advert_id = n.selfish.next_advert_id++;
                for (const auto& [dest, seen] : n.selfish.max_seen_seq)
                    adv.claims.emplace_back(dest, seen + cfg_.adversary.fake_seq_boost);
                // each wave outbids the previous one, so the capture tree
                // re-forms on current positions instead of going stale
                for (const auto& [dest, seq] : adv.claims) n.selfish.note_seq(dest, seq);
                pkt.body = adv;
            } else {
                pkt.ttl = 1;
            }
            log(pkt, 's', at);
            transmit_broadcast(at, pkt);
            ++n.selfish.floods_sent;
            ++stats_.floods_sent;
        }
    }

    void accept_junk(NodeId at, NodeId from, const Packet& pkt) {
        enqueue(at, pkt, true);
        log(pkt, 'r', at);
        if (node(pkt.src).role == Role::Selfish) {
            ++node(pkt.src).selfish.floods_accepted;
            ++stats_.floods_accepted;
        }
        const auto* adv = std::get_if<FalseRouteAdvert>(&pkt.body);
        if (!adv) return;
        NodeRuntime& n = node(at);
        if (n.aodv.flood_seen(adv->attacker, 0x80000000u | adv->advert_id, engine_.now(),
                              cfg_.aodv.dedup_lifetime))
            return; // already believed and relayed this wave
        for (const auto& [dest, seq] : adv->claims) {
            maybe_install(at, dest, from, seq, adv->hop_count + 1, adv->attacker);
            // a repeated identical lie keeps the victim's entry alive
            const RoutingTableEntry* e = n.aodv.rtable.find(dest);
            if (e && e->valid && e->reply_source == adv->attacker)
                n.aodv.rtable.refresh(dest, route_expiry());
        }
        if (pkt.ttl > 1) {
            Packet fwd = pkt;
            auto& fa = std::get<FalseRouteAdvert>(fwd.body);
            fa.hop_count += 1;
            fwd.ttl -= 1;
            log(fwd, 'f', at);
            transmit_broadcast(at, fwd);
        }
    }

    // -------------------------------------------------------------------- ids
    void ids_observe(NodeId ids_node, NodeId transmitter, const Packet& pkt) {
        NodeRuntime& me = node(ids_node);
        IdsNodeState& st = me.ids;
        if (st.blocked.count(transmitter)) return;
        RateWindow& w = st.windows[transmitter];
        w.observe(engine_.now(), cfg_.ids.window_len);
        if (check_selfishness(w, cfg_.ids) == Verdict::Block) {
            ids_block(ids_node, transmitter, BlockReason::RateThreshold);
            return;
        }
        if (pkt.kind == PacketKind::Rreq) {
            st.observe_rreq(std::get<RreqMessage>(pkt.body));
        } else if (pkt.kind == PacketKind::Rrep) {
            const auto& m = std::get<RrepMessage>(pkt.body);
            if (st.check_seq_anomaly(transmitter, m, cfg_.ids) == IdsNodeState::SeqVerdict::Block)
                ids_block(ids_node, transmitter, BlockReason::SeqAnomaly);
        }
    }

    void ids_block(NodeId ids_node, NodeId target, BlockReason why) {
        NodeRuntime& me = node(ids_node);
        IdsNodeState& st = me.ids;
        if (st.blocked.count(target)) return;
        st.blocked.insert(target);
        BlockEntry entry{target, engine_.now(), why};
        st.block_log.push_back(entry);
        stats_.blocks.push_back({ids_node, target, entry.at, why});
        apply_block(ids_node, target);
        IdsAlertMessage m;
        m.ids_node = ids_node;
        m.blocked = target;
        m.alert_id = st.next_alert_id++;
        me.seen_alerts.insert({m.ids_node, m.alert_id});
        Packet pkt;
        pkt.kind = PacketKind::IdsAlert;
        pkt.id = next_pkt_id_++;
        pkt.size = kAlertSize;
        pkt.src = ids_node;
        pkt.dst = target; // the alert's subject rides in the dst field
        pkt.body = m;
        log(pkt, 's', ids_node);
        transmit_broadcast(ids_node, pkt);
    }

    void apply_block(NodeId at, NodeId blocked) {
        NodeRuntime& n = node(at);
        n.blocklist.insert(blocked);
        for (const auto& [dest, seq] : n.aodv.rtable.routes_via(blocked)) {
            (void)seq;
            n.aodv.rtable.invalidate(dest);
        }
        // everything the blocked node ever vouched for goes too, inflated
        // sequence memory included, so honest replies can compete again
        n.aodv.rtable.purge_from(blocked);
        n.aodv.rtable.invalidate(blocked);
        recover_queued(at);
    }

    void handle_alert(NodeId at, NodeId from, const Packet& pkt) {
        (void)from;
        const auto& m = std::get<IdsAlertMessage>(pkt.body);
        NodeRuntime& n = node(at);
        if (!n.seen_alerts.insert({m.ids_node, m.alert_id}).second) return; // duplicate
        log(pkt, 'r', at);
        apply_block(at, m.blocked);
        if (pkt.ttl <= 1) return;
        Packet fwd = pkt;
        fwd.ttl -= 1;
        log(fwd, 'f', at);
        transmit_broadcast(at, fwd);
    }

    void ids_load_sweep(NodeId ids_node) {
        for (NodeId target = 0; target < cfg_.node_count; ++target) {
            if (node(target).role == Role::Selfish) continue; // attacker queues are not healed
            if (!in_range(world_.position(ids_node), world_.position(target), cfg_.radio)) continue;
            check_weak_node_load(ids_node, target);
        }
    }
};

} // namespace manetsim
