#pragma once

#include "manetsim/engine.hpp"
#include "manetsim/packet.hpp"
#include "manetsim/trace.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace manetsim {
namespace metrics {

inline bool is_data_token(const std::string& kind) {
    return kind == "DataUdp" || kind == "DataTcp";
}

inline bool is_routing_token(const std::string& kind) {
    return kind == "Rreq" || kind == "Rrep" || kind == "Rerr" || kind == "IdsAlert";
}

inline bool is_selfish_reason(const std::string& r) {
    return r == std::string(reason::selfish_block_tcp) || r == std::string(reason::selfish_capture_udp) ||
           r == std::string(reason::selfish_drop);
}

// Kinds carried by one-hop broadcast: many nodes legitimately receive or
// drop copies of the same pkt_id, so terminal uniqueness does not apply.
inline bool is_broadcast_kind(const std::string& kind) {
    return kind == "Rreq" || kind == "Rerr" || kind == "FalseFlood" || kind == "IdsAlert";
}

// Terminal records: delivery at the end-to-end destination, or any drop.
inline bool is_terminal(const TraceRecord& rec) {
    if (rec.action == 'd' || rec.action == 'b') return true;
    return rec.action == 'r' && rec.node == rec.dst;
}

struct ConservationViolation {
    std::uint64_t pkt_id;
    std::string what;
};

// Per-packet bookkeeping: exactly one origination, at most one terminal
// record for unicast packets, timestamps never before the origination.
inline std::vector<ConservationViolation> conservation_check(const std::vector<TraceRecord>& trace) {
    struct State {
        int originations = 0;
        int terminals = 0;
        bool seen_s = false;
        bool seen_other = false;
        SimTime s_time{};
        SimTime first_other{};
        bool bad_origin_node = false;
    };
    std::map<std::uint64_t, State> per_pkt;
    for (const TraceRecord& rec : trace) {
        if (rec.action == 'm') continue;
        State& st = per_pkt[rec.pkt_id];
        if (rec.action == 's') {
            ++st.originations;
            st.seen_s = true;
            st.s_time = rec.time;
            if (rec.node != rec.src) st.bad_origin_node = true; // origination must be at src
        } else {
            if (!st.seen_other) {
                st.seen_other = true;
                st.first_other = rec.time;
            }
            if (rec.dst != kBroadcast && !is_broadcast_kind(rec.kind) && is_terminal(rec))
                ++st.terminals;
        }
    }
    std::vector<ConservationViolation> out;
    for (const auto& [id, st] : per_pkt) {
        if (st.originations != 1)
            out.push_back({id, "expected exactly one origination, saw " +
                                   std::to_string(st.originations)});
        else if (st.terminals > 1)
            out.push_back({id, "multiple terminal records (" + std::to_string(st.terminals) + ")"});
        else if (st.seen_other && st.first_other < st.s_time)
            out.push_back({id, "record precedes its origination"});
        else if (st.bad_origin_node)
            out.push_back({id, "origination not logged at the packet's source"});
    }
    return out;
}

// 100 * delivered / originated over data packets. Zero originations is an
// undefined metric, not 0.
inline std::optional<double> pdf(const std::vector<TraceRecord>& trace) {
    std::uint64_t sent = 0, delivered = 0;
    for (const TraceRecord& rec : trace) {
        if (!is_data_token(rec.kind)) continue;
        if (rec.action == 's') ++sent;
        if (rec.action == 'r' && rec.node == rec.dst) ++delivered;
    }
    if (sent == 0) return std::nullopt;
    return 100.0 * static_cast<double>(delivered) / static_cast<double>(sent);
}

struct SeriesPoint {
    double bin_start;
    double value;
};

inline double last_time(const std::vector<TraceRecord>& trace) {
    return trace.empty() ? 0.0 : trace.back().time.seconds();
}

// Data deliveries per second, binned.
inline std::vector<SeriesPoint> throughput_series(const std::vector<TraceRecord>& trace, double bin) {
    if (bin <= 0) throw SimError("throughput_series: bin must be positive");
    std::size_t bins = static_cast<std::size_t>(std::floor(last_time(trace) / bin)) + 1;
    if (trace.empty()) bins = 0;
    std::vector<double> counts(bins, 0.0);
    for (const TraceRecord& rec : trace)
        if (is_data_token(rec.kind) && rec.action == 'r' && rec.node == rec.dst)
            counts[static_cast<std::size_t>(rec.time.seconds() / bin)] += 1.0;
    std::vector<SeriesPoint> out;
    for (std::size_t i = 0; i < bins; ++i) out.push_back({static_cast<double>(i) * bin, counts[i] / bin});
    return out;
}

// Routing-control transmissions per delivered data packet.
inline std::optional<double> nrl(const std::vector<TraceRecord>& trace) {
    std::uint64_t routing_tx = 0, delivered = 0;
    for (const TraceRecord& rec : trace) {
        if (is_routing_token(rec.kind) && (rec.action == 's' || rec.action == 'f')) ++routing_tx;
        if (is_data_token(rec.kind) && rec.action == 'r' && rec.node == rec.dst) ++delivered;
    }
    if (delivered == 0) return std::nullopt;
    return static_cast<double>(routing_tx) / static_cast<double>(delivered);
}

// Mean origination-to-delivery latency over delivered data packets.
inline std::optional<double> avg_end_to_end_delay(const std::vector<TraceRecord>& trace) {
    std::map<std::uint64_t, SimTime> sent_at;
    double total = 0.0;
    std::uint64_t samples = 0;
    for (const TraceRecord& rec : trace) {
        if (!is_data_token(rec.kind)) continue;
        if (rec.action == 's') {
            sent_at[rec.pkt_id] = rec.time;
        } else if (rec.action == 'r' && rec.node == rec.dst) {
            auto it = sent_at.find(rec.pkt_id);
            if (it != sent_at.end()) {
                total += (rec.time - it->second).seconds();
                ++samples;
            }
        }
    }
    if (samples == 0) return std::nullopt;
    return total / static_cast<double>(samples);
}

// Share of offered traffic per bin consumed by attacker activity: data whose
// terminal record is a selfish drop, plus flood packets victims accepted,
// over data originations plus flood receptions. Empty bins report 0.
inline std::vector<SeriesPoint> infection_series(const std::vector<TraceRecord>& trace, double bin) {
    if (bin <= 0) throw SimError("infection_series: bin must be positive");
    std::size_t bins = static_cast<std::size_t>(std::floor(last_time(trace) / bin)) + 1;
    if (trace.empty()) bins = 0;
    std::vector<double> num(bins, 0.0), den(bins, 0.0);
    for (const TraceRecord& rec : trace) {
        std::size_t b = static_cast<std::size_t>(rec.time.seconds() / bin);
        if (is_data_token(rec.kind)) {
            if (rec.action == 's') den[b] += 1.0;
            if (rec.action == 'd' && is_selfish_reason(rec.reason)) num[b] += 1.0;
        } else if (rec.kind == "FalseFlood" && rec.action == 'r') {
            den[b] += 1.0;
            num[b] += 1.0;
        }
    }
    std::vector<SeriesPoint> out;
    for (std::size_t i = 0; i < bins; ++i)
        out.push_back({static_cast<double>(i) * bin, den[i] == 0.0 ? 0.0 : 100.0 * num[i] / den[i]});
    return out;
}

// Last time an IDS alert was originated: the moment the final block landed.
inline std::optional<double> last_block_time(const std::vector<TraceRecord>& trace) {
    std::optional<double> t;
    for (const TraceRecord& rec : trace)
        if (rec.kind == "IdsAlert" && rec.action == 's') t = rec.time.seconds();
    return t;
}

struct CountRow {
    NodeId node;
    std::uint64_t count;
};

struct PacketTable {
    std::vector<CountRow> senders;   // data/ack originations per node
    std::vector<CountRow> receivers; // deliveries per node
    std::vector<CountRow> droppers;  // drops (d and b) per node
    std::uint64_t total_sent = 0;
    std::uint64_t total_received = 0;
    std::uint64_t total_dropped = 0;
};

struct PerNodeTables {
    PacketTable tcp_data;
    PacketTable tcp_ack;
};

// Per-node accounting for TCP data and TCP acknowledgements, mirroring the
// sender/receiver/dropper layout the analyzer's text tables print.
inline PerNodeTables per_node_tables(const std::vector<TraceRecord>& trace) {
    auto build = [&](const std::string& kind) {
        std::map<NodeId, std::uint64_t> sent, recv, drop;
        PacketTable t;
        for (const TraceRecord& rec : trace) {
            if (rec.kind != kind) continue;
            if (rec.action == 's') {
                ++sent[rec.node];
                ++t.total_sent;
            } else if (rec.action == 'r' && rec.node == rec.dst) {
                ++recv[rec.node];
                ++t.total_received;
            } else if (rec.action == 'd' || rec.action == 'b') {
                ++drop[rec.node];
                ++t.total_dropped;
            }
        }
        for (const auto& [n, c] : sent) t.senders.push_back({n, c});
        for (const auto& [n, c] : recv) t.receivers.push_back({n, c});
        for (const auto& [n, c] : drop) t.droppers.push_back({n, c});
        return t;
    };
    PerNodeTables out;
    out.tcp_data = build("DataTcp");
    out.tcp_ack = build("TcpAck");
    return out;
}

// Data tables carry six columns (sender/sent/receiver/received/dropper/
// dropped); acknowledgement tables carry four (receiver/received/dropper/
// dropped) — acks are implicit echoes, so nobody tabulates their senders.
inline std::string format_tables_text(const PerNodeTables& t) {
    std::ostringstream o;
    auto cell = [](const std::vector<CountRow>& v, std::size_t i, bool node_part) -> std::string {
        if (i >= v.size()) return node_part ? "-" : "";
        return std::to_string(node_part ? static_cast<std::int64_t>(v[i].node)
                                        : static_cast<std::int64_t>(v[i].count));
    };
    {
        const PacketTable& tab = t.tcp_data;
        o << "TCP data packets\n";
        o << "  sender       sent   receiver   received   dropper   dropped\n";
        std::size_t rows = std::max({tab.senders.size(), tab.receivers.size(), tab.droppers.size()});
        for (std::size_t i = 0; i < rows; ++i) {
            char line[160];
            std::snprintf(line, sizeof(line), "  %6s  %9s   %8s  %9s   %7s  %8s\n",
                          cell(tab.senders, i, true).c_str(), cell(tab.senders, i, false).c_str(),
                          cell(tab.receivers, i, true).c_str(), cell(tab.receivers, i, false).c_str(),
                          cell(tab.droppers, i, true).c_str(), cell(tab.droppers, i, false).c_str());
            o << line;
        }
        o << "  total sent = " << tab.total_sent << "  total received = " << tab.total_received
          << "  total dropped = " << tab.total_dropped << "\n";
    }
    o << "\n";
    {
        const PacketTable& tab = t.tcp_ack;
        o << "TCP acknowledgements\n";
        o << "  receiver   received   dropper   dropped\n";
        std::size_t rows = std::max(tab.receivers.size(), tab.droppers.size());
        for (std::size_t i = 0; i < rows; ++i) {
            char line[120];
            std::snprintf(line, sizeof(line), "  %8s  %9s   %7s  %8s\n",
                          cell(tab.receivers, i, true).c_str(), cell(tab.receivers, i, false).c_str(),
                          cell(tab.droppers, i, true).c_str(), cell(tab.droppers, i, false).c_str());
            o << line;
        }
        o << "  total received = " << tab.total_received << "  total dropped = " << tab.total_dropped
          << "\n";
    }
    return o.str();
}

inline std::string data_table_csv(const PacketTable& tab) {
    std::ostringstream o;
    o << "sender,sent,receiver,received,dropper,dropped\n";
    auto cell = [&](const std::vector<CountRow>& v, std::size_t i, bool node_part) -> std::string {
        if (i >= v.size()) return "";
        return std::to_string(node_part ? static_cast<std::int64_t>(v[i].node)
                                        : static_cast<std::int64_t>(v[i].count));
    };
    std::size_t rows = std::max({tab.senders.size(), tab.receivers.size(), tab.droppers.size()});
    for (std::size_t i = 0; i < rows; ++i) {
        o << cell(tab.senders, i, true) << ',' << cell(tab.senders, i, false) << ','
          << cell(tab.receivers, i, true) << ',' << cell(tab.receivers, i, false) << ','
          << cell(tab.droppers, i, true) << ',' << cell(tab.droppers, i, false) << "\n";
    }
    o << "total," << tab.total_sent << ",total," << tab.total_received << ",total," << tab.total_dropped
      << "\n";
    return o.str();
}

inline std::string ack_table_csv(const PacketTable& tab) {
    std::ostringstream o;
    o << "receiver,received,dropper,dropped\n";
    auto cell = [&](const std::vector<CountRow>& v, std::size_t i, bool node_part) -> std::string {
        if (i >= v.size()) return "";
        return std::to_string(node_part ? static_cast<std::int64_t>(v[i].node)
                                        : static_cast<std::int64_t>(v[i].count));
    };
    std::size_t rows = std::max(tab.receivers.size(), tab.droppers.size());
    for (std::size_t i = 0; i < rows; ++i) {
        o << cell(tab.receivers, i, true) << ',' << cell(tab.receivers, i, false) << ','
          << cell(tab.droppers, i, true) << ',' << cell(tab.droppers, i, false) << "\n";
    }
    o << "total," << tab.total_received << ",total," << tab.total_dropped << "\n";
    return o.str();
}

inline std::string series_csv(const std::vector<SeriesPoint>& series) {
    std::ostringstream o;
    o << "time,value\n";
    for (const SeriesPoint& p : series) {
        char line[64];
        std::snprintf(line, sizeof(line), "%.3f,%.6f\n", p.bin_start, p.value);
        o << line;
    }
    return o.str();
}

} // namespace metrics
} // namespace manetsim
