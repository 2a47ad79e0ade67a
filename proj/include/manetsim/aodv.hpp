#pragma once

#include "manetsim/packet.hpp"
#include "manetsim/sim_time.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

namespace manetsim {

struct AodvParams {
    double route_lifetime = 10.0;   // s, refreshed on use
    double dedup_lifetime = 10.0;   // s to remember seen (origin, broadcast_id)
    int rreq_retries = 2;           // retries after the first attempt
    double discovery_timeout = 1.0; // s per attempt
};

struct RoutingTableEntry {
    NodeId destination = 0;
    NodeId next_hop = 0;
    std::uint32_t dest_seq_no = 0;
    std::uint32_t hop_count = 0;
    SimTime expires_at{};
    bool valid = false;
    bool seq_known = false;   // false until any seq for this destination was heard
    NodeId reply_source = -1; // who vouched for this route (RREP replier / RREQ origin)
};

// Freshness rule: a strictly larger destination sequence number always wins;
// at equal seq a valid entry is only displaced by a shorter route, while an
// invalidated entry yields to any live one.
inline bool route_update_wins(const RoutingTableEntry* stored, std::uint32_t seq,
                              std::uint32_t hop_count) {
    if (stored == nullptr || !stored->seq_known) return true;
    if (seq > stored->dest_seq_no) return true;
    if (seq < stored->dest_seq_no) return false;
    if (!stored->valid) return true;
    return hop_count < stored->hop_count;
}

class RoutingTable {
  public:
    const RoutingTableEntry* find(NodeId dest) const {
        auto it = entries_.find(dest);
        return it == entries_.end() ? nullptr : &it->second;
    }

    // Valid, unexpired next hop or nothing. Expired entries are invalidated
    // in place (their seq memory survives).
    std::optional<NodeId> lookup(NodeId dest, SimTime now) {
        auto it = entries_.find(dest);
        if (it == entries_.end() || !it->second.valid) return std::nullopt;
        if (it->second.expires_at < now) {
            it->second.valid = false;
            return std::nullopt;
        }
        return it->second.next_hop;
    }

    // Installs/overwrites if the freshness rule allows it. Returns true when
    // the entry changed.
    bool update(NodeId dest, NodeId next_hop, std::uint32_t seq, std::uint32_t hop_count,
                SimTime expires_at, NodeId reply_source = -1) {
        auto it = entries_.find(dest);
        RoutingTableEntry* stored = it == entries_.end() ? nullptr : &it->second;
        if (!route_update_wins(stored, seq, hop_count)) return false;
        RoutingTableEntry e;
        e.destination = dest;
        e.next_hop = next_hop;
        e.dest_seq_no = stored && stored->dest_seq_no > seq ? stored->dest_seq_no : seq;
        e.hop_count = hop_count;
        e.expires_at = expires_at;
        e.valid = true;
        e.seq_known = true;
        e.reply_source = reply_source;
        entries_[dest] = e;
        return true;
    }

    // Every trace of routes vouched for by `source` goes away, sequence
    // memory included: a blocked node's numbers are not evidence.
    std::vector<NodeId> purge_from(NodeId source) {
        std::vector<NodeId> removed;
        for (auto it = entries_.begin(); it != entries_.end();) {
            if (it->second.reply_source == source) {
                removed.push_back(it->first);
                it = entries_.erase(it);
            } else {
                ++it;
            }
        }
        return removed;
    }

    void refresh(NodeId dest, SimTime expires_at) {
        auto it = entries_.find(dest);
        if (it != entries_.end() && it->second.valid && it->second.expires_at < expires_at)
            it->second.expires_at = expires_at;
    }

    // Marks the entry dead, keeping its sequence memory.
    void invalidate(NodeId dest) {
        auto it = entries_.find(dest);
        if (it != entries_.end()) it->second.valid = false;
    }

    // Drops everything known about dest, sequence memory included. Used
    // when repeated discovery failures suggest the freshness expectation
    // itself is bogus (a forged number no real node can match).
    void forget(NodeId dest) { entries_.erase(dest); }

    // Records a higher seq observed for dest (e.g. from an RERR) without
    // installing a route.
    void note_seq(NodeId dest, std::uint32_t seq) {
        auto it = entries_.find(dest);
        if (it == entries_.end()) {
            RoutingTableEntry e;
            e.destination = dest;
            e.dest_seq_no = seq;
            e.seq_known = true;
            entries_[dest] = e;
        } else if (!it->second.seq_known || seq > it->second.dest_seq_no) {
            it->second.dest_seq_no = seq;
            it->second.seq_known = true;
        }
    }

    // Valid routes using `hop` as next hop (for link breaks and block alerts).
    std::vector<std::pair<NodeId, std::uint32_t>> routes_via(NodeId hop) const {
        std::vector<std::pair<NodeId, std::uint32_t>> out;
        for (const auto& [dest, e] : entries_)
            if (e.valid && e.next_hop == hop) out.emplace_back(dest, e.dest_seq_no);
        return out;
    }

    const std::map<NodeId, RoutingTableEntry>& entries() const { return entries_; }

  private:
    std::map<NodeId, RoutingTableEntry> entries_; // ordered: deterministic iteration
};

// Per-node AODV protocol state. Packet handling lives in the simulation,
// which owns delivery; everything decision-shaped sits here for direct tests.
struct AodvNodeState {
    std::uint32_t own_seq = 0;
    std::uint32_t next_broadcast_id = 0;
    RoutingTable rtable;
    std::map<std::pair<NodeId, std::uint32_t>, SimTime> seen_floods; // -> expiry

    bool flood_seen(NodeId origin, std::uint32_t bcast_id, SimTime now, double lifetime) {
        // lazy purge keeps the map small on long runs
        for (auto it = seen_floods.begin(); it != seen_floods.end();) {
            if (it->second < now)
                it = seen_floods.erase(it);
            else
                ++it;
        }
        auto key = std::make_pair(origin, bcast_id);
        if (seen_floods.count(key)) return true;
        seen_floods[key] = now + SimTime::from_seconds(lifetime);
        return false;
    }
};

} // namespace manetsim
