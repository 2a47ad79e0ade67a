#pragma once

#include "manetsim/mobility.hpp"
#include "manetsim/sim_time.hpp"

#include <cstdint>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace manetsim {

enum class PacketKind : std::uint8_t {
    Rreq,
    Rrep,
    Rerr,
    DataUdp,
    DataTcp,
    TcpAck,
    FalseFlood,
    IdsAlert,
};

inline std::string_view kind_token(PacketKind k) {
    switch (k) {
        case PacketKind::Rreq: return "Rreq";
        case PacketKind::Rrep: return "Rrep";
        case PacketKind::Rerr: return "Rerr";
        case PacketKind::DataUdp: return "DataUdp";
        case PacketKind::DataTcp: return "DataTcp";
        case PacketKind::TcpAck: return "TcpAck";
        case PacketKind::FalseFlood: return "FalseFlood";
        case PacketKind::IdsAlert: return "IdsAlert";
    }
    return "?";
}

inline bool is_data_kind(PacketKind k) {
    return k == PacketKind::DataUdp || k == PacketKind::DataTcp;
}

// Routing control traffic for the normalized-routing-load metric. Block
// alerts count too: the defense pays for its own control overhead.
inline bool is_routing_kind(PacketKind k) {
    return k == PacketKind::Rreq || k == PacketKind::Rrep || k == PacketKind::Rerr ||
           k == PacketKind::IdsAlert;
}

struct RreqMessage {
    NodeId origin = 0;
    std::uint32_t origin_seq = 0;
    std::uint32_t broadcast_id = 0; // (origin, broadcast_id) identifies the flood
    NodeId destination = 0;
    std::uint32_t dest_seq_known = 0; // 0 when the origin has never heard of dest
    std::uint32_t hop_count = 0;
};

struct RrepMessage {
    NodeId destination = 0;
    std::uint32_t dest_seq_no = 0;
    std::uint32_t hop_count = 0;
    NodeId origin = 0; // the discovery originator the reply travels to
    double lifetime = 10.0;
};

struct RerrMessage {
    std::vector<std::pair<NodeId, std::uint32_t>> unreachable; // (dest, seq)
};

struct IdsAlertMessage {
    NodeId ids_node = 0;
    NodeId blocked = 0;
    std::uint32_t alert_id = 0;
};

// False shortest-route claims riding a flood packet: every receiver that
// believes them re-points the listed destinations toward the attacker.
struct FalseRouteAdvert {
    NodeId attacker = 0;
    std::uint32_t advert_id = 0;
    std::uint32_t hop_count = 0; // grows per rebroadcast, like an RREQ
    std::vector<std::pair<NodeId, std::uint32_t>> claims; // (dest, forged seq)
};

struct TcpInfo {
    std::uint32_t conn_id = 0;
    std::uint32_t seq = 0;
};

struct UdpInfo {
    std::uint32_t conn_id = 0;
};

using PacketBody = std::variant<std::monostate, RreqMessage, RrepMessage, RerrMessage,
                                IdsAlertMessage, FalseRouteAdvert, TcpInfo, UdpInfo>;

// Default control-packet sizes in bytes (data size comes from the connection).
inline constexpr int kRreqSize = 48;
inline constexpr int kRrepSize = 44;
inline constexpr int kRerrSize = 32;
inline constexpr int kAlertSize = 32;
inline constexpr int kAckSize = 40;
inline constexpr int kFloodSize = 64;
inline constexpr int kDefaultTtl = 35;

struct Packet {
    PacketKind kind = PacketKind::DataUdp;
    std::uint64_t id = 0; // unique per originated packet, preserved across hops
    int size = 0;         // bytes
    NodeId src = 0;       // end-to-end source
    NodeId dst = 0;       // end-to-end destination, kBroadcast for floods
    int ttl = kDefaultTtl;
    PacketBody body;
};

} // namespace manetsim
