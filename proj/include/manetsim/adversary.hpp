#pragma once

#include "manetsim/engine.hpp"
#include "manetsim/packet.hpp"

#include <algorithm>
#include <cstdint>
#include <map>

namespace manetsim {

struct AdversaryConfig {
    bool flood = true;
    double scan_rate = 1000.0;       // packets/s scanning capability
    double pkts_max = 10.0;          // per-node packet handling capacity
    std::uint32_t fake_seq_boost = 100;
    double flood_rate = 100.0;       // packets per flood window
    double flood_window = 1.0;       // s
    int flood_priority = 1;          // highest queue priority
    double flood_start = 1.0;        // s, first burst
};

// scan_rate * pkts_max / n_selfish: the per-attacker false-packet budget.
inline double false_packet_rate(const AdversaryConfig& cfg, int n_selfish) {
    if (n_selfish <= 0) throw SimError("false_packet_rate: no selfish nodes configured");
    return cfg.scan_rate * cfg.pkts_max / static_cast<double>(n_selfish);
}

// Packets actually emitted per burst: the configured burst size, capped by
// the attacker's share of the false-packet budget.
inline int flood_burst_size(const AdversaryConfig& cfg, int n_selfish) {
    return static_cast<int>(std::min(cfg.flood_rate, false_packet_rate(cfg, n_selfish)));
}

// Attack-side record keeping: highest destination seq seen per node, so a
// forged reply always out-freshens the real one.
struct SelfishNodeState {
    std::map<NodeId, std::uint32_t> max_seen_seq;
    std::uint32_t next_advert_id = 0;
    std::uint64_t floods_sent = 0;
    std::uint64_t floods_accepted = 0; // receptions the victims accepted

    void note_seq(NodeId dest, std::uint32_t seq) {
        auto it = max_seen_seq.find(dest);
        if (it == max_seen_seq.end() || seq > it->second) max_seen_seq[dest] = seq;
    }

    std::uint32_t forged_seq(NodeId dest, const AdversaryConfig& cfg) const {
        auto it = max_seen_seq.find(dest);
        std::uint32_t base = it == max_seen_seq.end() ? 0 : it->second;
        return base + cfg.fake_seq_boost;
    }
};

// The forged reply: claims a 1-hop, maximally fresh route to the requested
// destination.
inline RrepMessage forge_rrep(SelfishNodeState& st, const RreqMessage& rreq,
                              const AdversaryConfig& cfg, double lifetime) {
    st.note_seq(rreq.destination, rreq.dest_seq_known);
    RrepMessage rep;
    rep.destination = rreq.destination;
    rep.dest_seq_no = st.forged_seq(rreq.destination, cfg);
    rep.hop_count = 1;
    rep.origin = rreq.origin;
    rep.lifetime = lifetime;
    return rep;
}

} // namespace manetsim
