#pragma once

#include "manetsim/manetsim.hpp"

#include <deque>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

namespace manetsim::testutil {

// Scenario with explicit node positions, static by default.
inline ScenarioConfig mini_config(const std::vector<Position>& positions, double duration = 10.0) {
    ScenarioConfig cfg;
    cfg.duration = duration;
    cfg.seed = 1;
    cfg.node_count = static_cast<int>(positions.size());
    cfg.mobility.model = MobilityModel::Fixed;
    cfg.mobility.max_speed = 0.0;
    cfg.traffic.clear();
    for (int i = 0; i < cfg.node_count; ++i) cfg.positions[i] = positions[static_cast<std::size_t>(i)];
    return cfg;
}

inline Connection conn(ConnKind kind, NodeId src, NodeId dst, double rate = 4.0, double start = 0.1,
                       double stop = 5.0, int size = 512) {
    Connection c;
    c.kind = kind;
    c.source = src;
    c.sink = dst;
    c.rate = rate;
    c.packet_size = size;
    c.start_at = start;
    c.stop_at = stop;
    return c;
}

// Owns the trace buffer and the simulation; parses the trace after running.
struct MiniSim {
    explicit MiniSim(const ScenarioConfig& cfg) : sim(std::make_unique<Simulation>(cfg, out)) {}

    RunStats run() {
        stats = sim->run();
        std::istringstream in(out.str());
        records = TraceReader::read_stream(in);
        return stats;
    }

    std::string trace_text() const { return out.str(); }

    std::uint64_t count(char action, const std::string& kind, NodeId node = -2) const {
        std::uint64_t c = 0;
        for (const TraceRecord& r : records)
            if (r.action == action && r.kind == kind && (node == -2 || r.node == node)) ++c;
        return c;
    }

    std::uint64_t count_reason(const std::string& why) const {
        std::uint64_t c = 0;
        for (const TraceRecord& r : records)
            if (r.reason == why) ++c;
        return c;
    }

    std::uint64_t delivered(const std::string& kind) const {
        std::uint64_t c = 0;
        for (const TraceRecord& r : records)
            if (r.action == 'r' && r.kind == kind && r.node == r.dst) ++c;
        return c;
    }

    std::ostringstream out;
    std::unique_ptr<Simulation> sim;
    RunStats stats;
    std::vector<TraceRecord> records;
};

// Breadth-first hop counts over the unit-disk graph of `positions`.
inline std::vector<int> bfs_hops(const std::vector<Position>& positions, double rr, NodeId src) {
    std::vector<int> dist(positions.size(), -1);
    std::deque<NodeId> q{src};
    dist[static_cast<std::size_t>(src)] = 0;
    RadioRange range{rr};
    while (!q.empty()) {
        NodeId u = q.front();
        q.pop_front();
        for (NodeId v = 0; v < static_cast<NodeId>(positions.size()); ++v) {
            if (dist[static_cast<std::size_t>(v)] != -1 || v == u) continue;
            if (in_range(positions[static_cast<std::size_t>(u)], positions[static_cast<std::size_t>(v)],
                         range)) {
                dist[static_cast<std::size_t>(v)] = dist[static_cast<std::size_t>(u)] + 1;
                q.push_back(v);
            }
        }
    }
    return dist;
}

} // namespace manetsim::testutil
