#pragma once

#include "manetsim/adversary.hpp"
#include "manetsim/aodv.hpp"
#include "manetsim/engine.hpp"
#include "manetsim/ids.hpp"
#include "manetsim/mobility.hpp"
#include "manetsim/packet.hpp"

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace manetsim {

enum class Role { Normal, Selfish, Ids };

inline std::string_view role_token(Role r) {
    switch (r) {
        case Role::Normal: return "normal";
        case Role::Selfish: return "selfish";
        case Role::Ids: return "ids";
    }
    return "?";
}

enum class ConnKind { CbrUdp, Tcp };

struct Connection {
    ConnKind kind = ConnKind::CbrUdp;
    NodeId source = 0;
    NodeId sink = 0;
    double rate = 4.0;      // packets/s
    int packet_size = 512;  // bytes
    double start_at = 1.0;  // s
    double stop_at = 95.0;  // s

    bool operator==(const Connection&) const = default;
};

enum class Placement { Grid, Random };

struct ScenarioConfig {
    // [sim]
    double duration = 100.0;
    std::uint64_t seed = 1;
    double area_width = 800.0;
    double area_height = 600.0;
    double t0 = 0.0;

    // [radio]
    RadioRange radio{250.0};
    double bandwidth_bps = 2e6;
    double proc_delay = 0.001; // s per hop

    // [mobility]
    MobilityParams mobility{};
    Placement placement = Placement::Grid;
    std::map<NodeId, Position> positions; // explicit overrides

    // [roles]
    int node_count = 30;
    std::set<NodeId> selfish;
    std::set<NodeId> ids_nodes;

    // [traffic]
    std::vector<Connection> traffic;

    // [adversary] / [ids]
    AdversaryConfig adversary{};
    IdsConfig ids{};

    AodvParams aodv{};

    Role role_of(NodeId n) const {
        if (selfish.count(n)) return Role::Selfish;
        if (ids_nodes.count(n)) return Role::Ids;
        return Role::Normal;
    }

    bool operator==(const ScenarioConfig& o) const {
        auto key = [](const ScenarioConfig& c) {
            return std::tuple(c.duration, c.seed, c.area_width, c.area_height, c.t0, c.radio.rr,
                              c.bandwidth_bps, c.proc_delay, c.mobility.model,
                              c.mobility.max_speed, c.mobility.pause_time,
                              c.mobility.update_interval, c.placement, c.node_count);
        };
        auto adv = [](const AdversaryConfig& a) {
            return std::tuple(a.flood, a.scan_rate, a.pkts_max, a.fake_seq_boost, a.flood_rate,
                              a.flood_window, a.flood_priority, a.flood_start);
        };
        auto idsk = [](const IdsConfig& i) {
            return std::tuple(i.threshold, i.window_len, i.seq_margin, i.normal_load);
        };
        auto pos_eq = [&] {
            if (positions.size() != o.positions.size()) return false;
            for (const auto& [n, p] : positions) {
                auto it = o.positions.find(n);
                if (it == o.positions.end() || it->second.x != p.x || it->second.y != p.y)
                    return false;
            }
            return true;
        };
        return key(*this) == key(o) && adv(adversary) == adv(o.adversary) && idsk(ids) == idsk(o.ids) &&
               selfish == o.selfish && ids_nodes == o.ids_nodes && traffic == o.traffic && pos_eq();
    }
};

// The stock 20-connection pattern used when a scenario omits [traffic]:
// alternating TCP/UDP between the scenario's sender/receiver node sets.
inline std::vector<Connection> default_connections() {
    static constexpr NodeId senders[] = {0, 2, 5, 6, 22, 25};
    static constexpr NodeId receivers[] = {7, 11, 19, 21, 24, 28};
    std::vector<Connection> conns;
    for (int i = 0; i < 20; ++i) {
        Connection c;
        c.kind = (i % 2 == 0) ? ConnKind::Tcp : ConnKind::CbrUdp;
        c.source = senders[i % 6];
        c.sink = receivers[(i + i / 6) % 6];
        conns.push_back(c);
    }
    return conns;
}

// Deterministic grid placement covering the area; 30 nodes on 800x600 get a
// 6x5 lattice with every lateral and diagonal neighbor inside a 250 m range.
inline std::vector<Position> grid_positions(int n, double w, double h) {
    int cols = std::max(1, static_cast<int>(std::lround(std::sqrt(n * w / h))));
    int rows = (n + cols - 1) / cols;
    std::vector<Position> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        int col = i % cols;
        int row = i / cols;
        out.push_back({(col + 0.5) * w / cols, (row + 0.5) * h / rows});
    }
    return out;
}

class ScenarioError : public SimError {
  public:
    ScenarioError(const std::string& msg, int line) : SimError(format(msg, line)), line_(line) {}
    int line() const { return line_; }

  private:
    static std::string format(const std::string& msg, int line) {
        return "scenario line " + std::to_string(line) + ": " + msg;
    }
    int line_;
};

namespace detail {

struct ScenarioParser {
    ScenarioConfig cfg;
    std::string section;
    int line_no = 0;
    bool flood_explicit = false;
    bool traffic_seen = false;

    [[noreturn]] void fail(const std::string& msg) const { throw ScenarioError(msg, line_no); }

    double num(const std::string& v, const char* what) const {
        try {
            std::size_t used = 0;
            double d = std::stod(v, &used);
            if (used != v.size()) fail(std::string("bad ") + what + " '" + v + "'");
            return d;
        } catch (const ScenarioError&) {
            throw;
        } catch (...) {
            fail(std::string("bad ") + what + " '" + v + "'");
        }
    }

    std::vector<NodeId> id_list(const std::string& v) const {
        std::vector<NodeId> out;
        std::istringstream is(v);
        long id = 0;
        while (is >> id) out.push_back(static_cast<NodeId>(id));
        if (!is.eof()) fail("bad node id list '" + v + "'");
        return out;
    }

    void handle(const std::string& key, const std::string& value) {
        if (section == "sim")
            sim_key(key, value);
        else if (section == "radio")
            radio_key(key, value);
        else if (section == "mobility")
            mobility_key(key, value);
        else if (section == "roles")
            roles_key(key, value);
        else if (section == "traffic")
            traffic_key(key, value);
        else if (section == "adversary")
            adversary_key(key, value);
        else if (section == "ids")
            ids_key(key, value);
        else
            fail("key '" + key + "' outside any known section");
    }

    void sim_key(const std::string& k, const std::string& v) {
        if (k == "duration")
            cfg.duration = num(v, "duration");
        else if (k == "seed")
            cfg.seed = static_cast<std::uint64_t>(num(v, "seed"));
        else if (k == "area") {
            std::istringstream is(v);
            if (!(is >> cfg.area_width >> cfg.area_height)) fail("bad area '" + v + "'");
        } else if (k == "t0")
            cfg.t0 = num(v, "t0");
        else
            fail("unknown key '" + k + "' in [sim]");
    }

    void radio_key(const std::string& k, const std::string& v) {
        if (k == "range")
            cfg.radio.rr = num(v, "range");
        else if (k == "bandwidth")
            cfg.bandwidth_bps = num(v, "bandwidth");
        else if (k == "proc_delay")
            cfg.proc_delay = num(v, "proc_delay");
        else
            fail("unknown key '" + k + "' in [radio]");
    }

    void mobility_key(const std::string& k, const std::string& v) {
        if (k == "model") {
            if (v == "fixed")
                cfg.mobility.model = MobilityModel::Fixed;
            else if (v == "random-waypoint")
                cfg.mobility.model = MobilityModel::RandomWaypoint;
            else
                fail("unknown mobility model '" + v + "'");
        } else if (k == "max_speed")
            cfg.mobility.max_speed = num(v, "max_speed");
        else if (k == "pause_time")
            cfg.mobility.pause_time = num(v, "pause_time");
        else if (k == "update_interval")
            cfg.mobility.update_interval = num(v, "update_interval");
        else if (k == "placement") {
            if (v == "grid")
                cfg.placement = Placement::Grid;
            else if (v == "random")
                cfg.placement = Placement::Random;
            else
                fail("unknown placement '" + v + "'");
        } else if (k.rfind("pos.", 0) == 0) {
            NodeId id = static_cast<NodeId>(num(k.substr(4), "node id"));
            Position p;
            std::istringstream is(v);
            if (!(is >> p.x >> p.y)) fail("bad position '" + v + "'");
            cfg.positions[id] = p;
        } else
            fail("unknown key '" + k + "' in [mobility]");
    }

    void roles_key(const std::string& k, const std::string& v) {
        if (k == "node_count")
            cfg.node_count = static_cast<int>(num(v, "node_count"));
        else if (k == "selfish")
            for (NodeId id : id_list(v)) cfg.selfish.insert(id);
        else if (k == "ids")
            for (NodeId id : id_list(v)) cfg.ids_nodes.insert(id);
        else
            fail("unknown key '" + k + "' in [roles]");
    }

    void traffic_key(const std::string& k, const std::string& v) {
        if (k != "conn") fail("unknown key '" + k + "' in [traffic]");
        traffic_seen = true;
        std::istringstream is(v);
        std::string kind;
        Connection c;
        long src = 0, dst = 0;
        if (!(is >> kind >> src >> dst)) fail("bad connection '" + v + "'");
        if (kind == "tcp")
            c.kind = ConnKind::Tcp;
        else if (kind == "udp" || kind == "cbr-udp")
            c.kind = ConnKind::CbrUdp;
        else
            fail("unknown connection kind '" + kind + "'");
        c.source = static_cast<NodeId>(src);
        c.sink = static_cast<NodeId>(dst);
        // optional tail: rate size start stop
        if (!(is >> c.rate)) c.rate = 4.0;
        is.clear();
        if (!(is >> c.packet_size)) c.packet_size = 512;
        is.clear();
        if (!(is >> c.start_at)) c.start_at = 1.0;
        is.clear();
        if (!(is >> c.stop_at)) c.stop_at = 95.0;
        cfg.traffic.push_back(c);
    }

    void adversary_key(const std::string& k, const std::string& v) {
        if (k == "flood") {
            cfg.adversary.flood = (v == "on" || v == "true" || v == "1");
            flood_explicit = true;
        } else if (k == "scan_rate")
            cfg.adversary.scan_rate = num(v, "scan_rate");
        else if (k == "pkts_max")
            cfg.adversary.pkts_max = num(v, "pkts_max");
        else if (k == "fake_seq_boost")
            cfg.adversary.fake_seq_boost = static_cast<std::uint32_t>(num(v, "fake_seq_boost"));
        else if (k == "flood_rate")
            cfg.adversary.flood_rate = num(v, "flood_rate");
        else if (k == "flood_window")
            cfg.adversary.flood_window = num(v, "flood_window");
        else if (k == "flood_priority")
            cfg.adversary.flood_priority = static_cast<int>(num(v, "flood_priority"));
        else if (k == "flood_start")
            cfg.adversary.flood_start = num(v, "flood_start");
        else
            fail("unknown key '" + k + "' in [adversary]");
    }

    void ids_key(const std::string& k, const std::string& v) {
        if (k == "threshold")
            cfg.ids.threshold = num(v, "threshold");
        else if (k == "window")
            cfg.ids.window_len = num(v, "window");
        else if (k == "seq_margin")
            cfg.ids.seq_margin = static_cast<std::uint32_t>(num(v, "seq_margin"));
        else if (k == "normal_load")
            cfg.ids.normal_load = num(v, "normal_load");
        else
            fail("unknown key '" + k + "' in [ids]");
    }
};

inline std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

} // namespace detail

// Parses the line-oriented `key = value` scenario format. Omitted keys keep
// the stock 30-node / 100 s / 800x600 / 250 m / 20-connection defaults.
inline ScenarioConfig parse_scenario_stream(std::istream& in) {
    detail::ScenarioParser p;
    std::string raw;
    while (std::getline(in, raw)) {
        ++p.line_no;
        std::string line = raw;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') p.fail("unterminated section header '" + line + "'");
            std::string sec = line.substr(1, line.size() - 2);
            static const std::set<std::string> known = {"sim",     "radio",     "mobility", "roles",
                                                        "traffic", "adversary", "ids"};
            if (!known.count(sec)) p.fail("unknown section [" + sec + "]");
            p.section = sec;
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos) p.fail("expected 'key = value', got '" + line + "'");
        std::string key = detail::trim(line.substr(0, eq));
        std::string value = detail::trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) p.fail("empty key or value");
        p.handle(key, value);
    }

    ScenarioConfig& cfg = p.cfg;
    if (!p.traffic_seen) cfg.traffic = default_connections();

    // validation
    auto vfail = [&](const std::string& msg) { throw ScenarioError(msg, p.line_no); };
    if (cfg.node_count <= 0) vfail("node_count must be positive");
    if (cfg.duration <= 0) vfail("duration must be positive");
    if (cfg.radio.rr <= 0) vfail("radio range must be positive");
    if (cfg.mobility.update_interval <= 0) vfail("update_interval must be positive");
    for (NodeId n : cfg.selfish) {
        if (n < 0 || n >= cfg.node_count) vfail("selfish node " + std::to_string(n) + " out of range");
        if (cfg.ids_nodes.count(n))
            vfail("node " + std::to_string(n) + " declared both selfish and ids");
    }
    for (NodeId n : cfg.ids_nodes)
        if (n < 0 || n >= cfg.node_count) vfail("ids node " + std::to_string(n) + " out of range");
    for (const auto& [n, pos] : cfg.positions) {
        if (n < 0 || n >= cfg.node_count) vfail("position for unknown node " + std::to_string(n));
        if (pos.x < 0 || pos.x > cfg.area_width || pos.y < 0 || pos.y > cfg.area_height)
            vfail("position for node " + std::to_string(n) + " outside area");
    }
    for (const Connection& c : cfg.traffic) {
        if (c.source < 0 || c.source >= cfg.node_count || c.sink < 0 || c.sink >= cfg.node_count)
            vfail("connection endpoint out of range");
        if (c.source == c.sink) vfail("connection source equals sink");
        if (c.rate <= 0 || c.packet_size <= 0) vfail("connection rate/size must be positive");
        if (c.start_at >= c.stop_at) vfail("connection start_at must precede stop_at");
    }
    if (p.flood_explicit && cfg.adversary.flood && cfg.selfish.empty())
        vfail("adversary enabled with zero selfish nodes");
    return cfg;
}

inline ScenarioConfig parse_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SimError("cannot open scenario file: " + path);
    return parse_scenario_stream(in);
}

// Canonical serialization; parse(serialize(cfg)) == cfg.
inline std::string serialize_scenario(const ScenarioConfig& cfg) {
    std::ostringstream o;
    auto n = [&](double d) {
        std::ostringstream t;
        t << d;
        return t.str();
    };
    o << "[sim]\n";
    o << "duration = " << n(cfg.duration) << "\n";
    o << "seed = " << cfg.seed << "\n";
    o << "area = " << n(cfg.area_width) << " " << n(cfg.area_height) << "\n";
    o << "t0 = " << n(cfg.t0) << "\n\n";
    o << "[radio]\n";
    o << "range = " << n(cfg.radio.rr) << "\n";
    o << "bandwidth = " << n(cfg.bandwidth_bps) << "\n";
    o << "proc_delay = " << n(cfg.proc_delay) << "\n\n";
    o << "[mobility]\n";
    o << "model = " << (cfg.mobility.model == MobilityModel::Fixed ? "fixed" : "random-waypoint")
      << "\n";
    o << "max_speed = " << n(cfg.mobility.max_speed) << "\n";
    o << "pause_time = " << n(cfg.mobility.pause_time) << "\n";
    o << "update_interval = " << n(cfg.mobility.update_interval) << "\n";
    o << "placement = " << (cfg.placement == Placement::Grid ? "grid" : "random") << "\n";
    for (const auto& [id, pos] : cfg.positions)
        o << "pos." << id << " = " << n(pos.x) << " " << n(pos.y) << "\n";
    o << "\n[roles]\n";
    o << "node_count = " << cfg.node_count << "\n";
    if (!cfg.selfish.empty()) {
        o << "selfish =";
        for (NodeId id : cfg.selfish) o << " " << id;
        o << "\n";
    }
    if (!cfg.ids_nodes.empty()) {
        o << "ids =";
        for (NodeId id : cfg.ids_nodes) o << " " << id;
        o << "\n";
    }
    o << "\n[traffic]\n";
    for (const Connection& c : cfg.traffic) {
        o << "conn = " << (c.kind == ConnKind::Tcp ? "tcp" : "udp") << " " << c.source << " "
          << c.sink << " " << n(c.rate) << " " << c.packet_size << " " << n(c.start_at) << " "
          << n(c.stop_at) << "\n";
    }
    o << "\n[adversary]\n";
    // an explicit "flood = on" with no selfish nodes is a validation error,
    // so the default-on flag is written only when it says something
    if (!cfg.adversary.flood)
        o << "flood = off\n";
    else if (!cfg.selfish.empty())
        o << "flood = on\n";
    o << "scan_rate = " << n(cfg.adversary.scan_rate) << "\n";
    o << "pkts_max = " << n(cfg.adversary.pkts_max) << "\n";
    o << "fake_seq_boost = " << cfg.adversary.fake_seq_boost << "\n";
    o << "flood_rate = " << n(cfg.adversary.flood_rate) << "\n";
    o << "flood_window = " << n(cfg.adversary.flood_window) << "\n";
    o << "flood_priority = " << cfg.adversary.flood_priority << "\n";
    o << "flood_start = " << n(cfg.adversary.flood_start) << "\n";
    o << "\n[ids]\n";
    o << "threshold = " << n(cfg.ids.threshold) << "\n";
    o << "window = " << n(cfg.ids.window_len) << "\n";
    o << "seq_margin = " << cfg.ids.seq_margin << "\n";
    o << "normal_load = " << n(cfg.ids.normal_load) << "\n";
    return o.str();
}

} // namespace manetsim
