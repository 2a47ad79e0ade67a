#pragma once

#include "manetsim/packet.hpp"
#include "manetsim/sim_time.hpp"

#include <cstdint>
#include <map>
#include <set>
#include <vector>

namespace manetsim {

struct IdsConfig {
    double threshold = 100.0;  // packets per detection window
    double window_len = 1.0;   // s
    std::uint32_t seq_margin = 1;
    double normal_load = 0.8;  // queue occupancy fraction considered normal
};

enum class BlockReason { RateThreshold, SeqAnomaly, LoadInfection };

inline std::string_view block_reason_token(BlockReason r) {
    switch (r) {
        case BlockReason::RateThreshold: return "rate-threshold";
        case BlockReason::SeqAnomaly: return "seq-anomaly";
        case BlockReason::LoadInfection: return "load-infection";
    }
    return "?";
}

struct BlockEntry {
    NodeId blocked = 0;
    SimTime at{};
    BlockReason reason = BlockReason::RateThreshold;
};

// Per-sender transmission counter over a sliding window anchored at the
// first packet seen after the previous window expired.
struct RateWindow {
    SimTime window_start{};
    std::uint64_t count = 0;

    std::uint64_t observe(SimTime now, double window_len) {
        if (count == 0 || (now - window_start).seconds() >= window_len) {
            window_start = now;
            count = 0;
        }
        return ++count;
    }
};

enum class Verdict { Accept, Block };

// Accept below the threshold, block at or above it.
inline Verdict check_selfishness(const RateWindow& window, const IdsConfig& cfg) {
    return static_cast<double>(window.count) < cfg.threshold ? Verdict::Accept : Verdict::Block;
}

// Monitoring state of one IDS node. The true_max map holds per-destination
// sequence numbers learned only from transmissions by the destination (or
// origin) itself, never from relays.
struct IdsNodeState {
    std::map<NodeId, RateWindow> windows;
    std::map<NodeId, std::uint32_t> true_max_seq;
    std::set<NodeId> blocked;
    std::vector<BlockEntry> block_log;
    std::uint32_t next_alert_id = 0;
    std::uint64_t infection_removals = 0;

    void learn_seq(NodeId dest, std::uint32_t seq) {
        auto it = true_max_seq.find(dest);
        if (it == true_max_seq.end() || seq > it->second) true_max_seq[dest] = seq;
    }

    // Every overheard RREQ teaches two things: the origin's own sequence
    // number (carried verbatim through the flood) and what the requester
    // already knows about the destination. Over-learning is safe; it can
    // only make the anomaly channel more conservative.
    void observe_rreq(const RreqMessage& rreq) {
        learn_seq(rreq.origin, rreq.origin_seq);
        if (rreq.dest_seq_known > 0) learn_seq(rreq.destination, rreq.dest_seq_known);
    }

    // The anomaly channel abstains when this destination was never overheard
    // originating; the rate channel still covers the attacker.
    enum class SeqVerdict { Ok, Block, Abstain };

    SeqVerdict check_seq_anomaly(NodeId transmitter, const RrepMessage& rrep,
                                 const IdsConfig& cfg) {
        if (transmitter == rrep.destination) {
            learn_seq(rrep.destination, rrep.dest_seq_no);
            return SeqVerdict::Ok;
        }
        // One-hop claims by non-destinations are checked, never believed:
        // a forger must not get to seed the truth table with its own number.
        // Deeper relays are mere carriers, so their values are absorbed.
        bool adjacency_claim = rrep.hop_count <= 1;
        auto it = true_max_seq.find(rrep.destination);
        bool known = it != true_max_seq.end();
        std::uint32_t prior = known ? it->second : 0;
        if (!adjacency_claim) learn_seq(rrep.destination, rrep.dest_seq_no);
        if (!known) return SeqVerdict::Abstain;
        if (rrep.dest_seq_no > prior + cfg.seq_margin)
            return adjacency_claim ? SeqVerdict::Block : SeqVerdict::Abstain;
        if (adjacency_claim) learn_seq(rrep.destination, rrep.dest_seq_no); // within margin: honest
        return SeqVerdict::Ok;
    }
};

} // namespace manetsim
