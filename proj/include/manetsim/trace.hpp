#pragma once

#include "manetsim/engine.hpp"
#include "manetsim/packet.hpp"
#include "manetsim/sim_time.hpp"

#include <charconv>
#include <cstdint>
#include <fstream>
#include <functional>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace manetsim {

inline constexpr std::string_view kTraceHeader = "#manetsim-trace v1";

// Drop/block reason tokens (closed set; "-" when not applicable).
namespace reason {
inline constexpr std::string_view none = "-";
inline constexpr std::string_view no_route = "no-route";
inline constexpr std::string_view ifq_full = "ifq-full";
inline constexpr std::string_view selfish_block_tcp = "selfish-block-tcp";
inline constexpr std::string_view selfish_capture_udp = "selfish-capture-udp";
inline constexpr std::string_view selfish_drop = "selfish-drop";
inline constexpr std::string_view blocked_sender = "blocked-sender";
inline constexpr std::string_view rerr_invalidated = "rerr-invalidated";
inline constexpr std::string_view ttl_expired = "ttl-expired";
} // namespace reason

// One observable simulator event, one line in the trace file:
//   <time.6> <action> <node> <kind> <pkt_id> <size> <src> <dst> <reason>
// Actions: s originate, r receive/accept, f forward, d drop, b blocklist
// drop, m mobility sample (kind "Pos", position carried in the reason field).
struct TraceRecord {
    SimTime time;
    char action = 's';
    NodeId node = 0;
    std::string kind;
    std::uint64_t pkt_id = 0;
    int size = 0;
    NodeId src = 0;
    NodeId dst = 0;
    std::string reason = std::string(reason::none);

    std::string to_line() const {
        std::string out = time.to_string();
        out += ' ';
        out += action;
        out += ' ';
        out += std::to_string(node);
        out += ' ';
        out += kind;
        out += ' ';
        out += std::to_string(pkt_id);
        out += ' ';
        out += std::to_string(size);
        out += ' ';
        out += std::to_string(src);
        out += ' ';
        out += std::to_string(dst);
        out += ' ';
        out += reason;
        return out;
    }

    bool operator==(const TraceRecord&) const = default;
};

// Append-only, single-writer trace sink. Records must arrive in
// event-execution order; time regressions are a bug and are rejected.
class TraceWriter {
  public:
    explicit TraceWriter(const std::string& path) : own_(path, std::ios::trunc), out_(&own_) {
        if (!own_) throw SimError("cannot open trace file: " + path);
        write_header();
    }

    explicit TraceWriter(std::ostream& out) : out_(&out) { write_header(); }

    void log(const TraceRecord& rec) {
        if (rec.time < last_) throw SimError("trace time went backwards at " + rec.time.to_string());
        last_ = rec.time;
        (*out_) << rec.to_line() << '\n';
        if (!*out_) throw SimError("trace write failed");
    }

    void flush() { out_->flush(); }

  private:
    void write_header() { (*out_) << kTraceHeader << '\n'; }

    std::ofstream own_;
    std::ostream* out_;
    SimTime last_{};
};

namespace detail {

inline std::int64_t parse_int(std::string_view tok, int line_no, std::string_view what) {
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || ptr != tok.data() + tok.size())
        throw SimError("trace line " + std::to_string(line_no) + ": bad " + std::string(what) +
                       " '" + std::string(tok) + "'");
    return v;
}

inline SimTime parse_time(std::string_view tok, int line_no) {
    auto dot = tok.find('.');
    if (dot == std::string_view::npos || tok.size() - dot - 1 != 6)
        throw SimError("trace line " + std::to_string(line_no) + ": bad timestamp '" +
                       std::string(tok) + "'");
    std::int64_t whole = parse_int(tok.substr(0, dot), line_no, "timestamp");
    std::int64_t frac = parse_int(tok.substr(dot + 1), line_no, "timestamp");
    return SimTime::from_micros(whole * 1000000 + frac);
}

} // namespace detail

// Parses a completed trace file. Yields records in file order; any malformed
// line aborts with its line number.
class TraceReader {
  public:
    static std::vector<TraceRecord> read_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw SimError("cannot open trace file: " + path);
        return read_stream(in);
    }

    static std::vector<TraceRecord> read_stream(std::istream& in) {
        std::vector<TraceRecord> out;
        for_each(in, [&](const TraceRecord& r) { out.push_back(r); });
        return out;
    }

    static void for_each(std::istream& in, const std::function<void(const TraceRecord&)>& fn) {
        std::string line;
        if (!std::getline(in, line) || line != kTraceHeader)
            throw SimError("trace: missing header '" + std::string(kTraceHeader) + "'");
        int line_no = 1;
        SimTime last{};
        while (std::getline(in, line)) {
            ++line_no;
            if (line.empty() || line[0] == '#') continue;
            TraceRecord rec = parse_line(line, line_no);
            if (rec.time < last)
                throw SimError("trace line " + std::to_string(line_no) + ": time not monotone");
            last = rec.time;
            fn(rec);
        }
    }

    static TraceRecord parse_line(std::string_view line, int line_no) {
        std::vector<std::string_view> f;
        std::size_t pos = 0;
        while (pos < line.size()) {
            std::size_t sp = line.find(' ', pos);
            if (sp == std::string_view::npos) sp = line.size();
            if (sp > pos) f.push_back(line.substr(pos, sp - pos));
            pos = sp + 1;
        }
        if (f.size() != 9)
            throw SimError("trace line " + std::to_string(line_no) + ": expected 9 fields, got " +
                           std::to_string(f.size()));
        if (f[1].size() != 1 || std::string_view("srfdbm").find(f[1][0]) == std::string_view::npos)
            throw SimError("trace line " + std::to_string(line_no) + ": bad action '" +
                           std::string(f[1]) + "'");
        TraceRecord rec;
        rec.time = detail::parse_time(f[0], line_no);
        rec.action = f[1][0];
        rec.node = static_cast<NodeId>(detail::parse_int(f[2], line_no, "node"));
        rec.kind = std::string(f[3]);
        rec.pkt_id = static_cast<std::uint64_t>(detail::parse_int(f[4], line_no, "pkt_id"));
        rec.size = static_cast<int>(detail::parse_int(f[5], line_no, "size"));
        rec.src = static_cast<NodeId>(detail::parse_int(f[6], line_no, "src"));
        rec.dst = static_cast<NodeId>(detail::parse_int(f[7], line_no, "dst"));
        rec.reason = std::string(f[8]);
        return rec;
    }
};

} // namespace manetsim
