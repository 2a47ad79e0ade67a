#pragma once

#include "manetsim/rng.hpp"
#include "manetsim/sim_time.hpp"

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace manetsim {

using NodeId = std::int32_t;
inline constexpr NodeId kBroadcast = -1;

struct Position {
    double x = 0.0;
    double y = 0.0;
};

inline double distance(Position a, Position b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

struct RadioRange {
    double rr = 250.0;
};

// Unit-disk link test, inclusive at the boundary. Compared on squared
// distance so the 250 m == 250 m case has no sqrt rounding.
inline bool in_range(Position a, Position b, RadioRange range) {
    double dx = a.x - b.x;
    double dy = a.y - b.y;
    return dx * dx + dy * dy <= range.rr * range.rr;
}

enum class MobilityModel { Fixed, RandomWaypoint };

struct MobilityParams {
    MobilityModel model = MobilityModel::RandomWaypoint;
    double max_speed = 30.0;      // m/s
    double pause_time = 0.0;      // s at each waypoint
    double update_interval = 0.1; // s between position updates
};

// Node positions plus per-node random-waypoint state over a rectangular area.
class MobilityWorld {
  public:
    MobilityWorld(double width, double height, MobilityParams params)
        : width_(width), height_(height), params_(params) {}

    NodeId add_node(Position p, RngStream rng) {
        nodes_.push_back(NodeState{p, p, 0.0, 0.0, rng});
        return static_cast<NodeId>(nodes_.size() - 1);
    }

    std::size_t size() const { return nodes_.size(); }

    Position position(NodeId id) const { return state(id).pos; }

    void set_position(NodeId id, Position p) {
        check_inside(p);
        auto& n = state(id);
        n.pos = p;
        n.waypoint = p; // keeps a scripted node parked until the next draw
    }

    // Scripted motion: force the current leg instead of drawing one.
    void set_leg(NodeId id, Position waypoint, double speed) {
        check_inside(waypoint);
        auto& n = state(id);
        n.waypoint = waypoint;
        n.speed = speed;
        n.pause_left = 0.0;
    }

    bool moving() const {
        return params_.model == MobilityModel::RandomWaypoint && params_.max_speed > 0.0;
    }

    const MobilityParams& params() const { return params_; }

    // Advances node `id` by `dt` seconds of random-waypoint motion and
    // returns the new position. A node at its waypoint pauses, then draws a
    // fresh uniform waypoint and a uniform speed in (0, max_speed].
    Position step_random_waypoint(NodeId id, double dt) {
        auto& n = state(id);
        if (!moving()) return n.pos;
        double left = dt;
        while (left > 1e-12) {
            if (n.pause_left > 0.0) {
                double used = std::min(n.pause_left, left);
                n.pause_left -= used;
                left -= used;
                continue;
            }
            if (n.speed <= 0.0) { // needs a fresh leg
                draw_leg(n);
                continue;
            }
            double remaining = distance(n.pos, n.waypoint);
            double reach = n.speed * left;
            if (reach + 1e-12 >= remaining) { // arrives this step
                n.pos = n.waypoint;
                left -= (n.speed > 0.0 ? remaining / n.speed : left);
                n.speed = 0.0;
                n.pause_left = params_.pause_time;
                continue;
            }
            double f = reach / remaining;
            n.pos.x += (n.waypoint.x - n.pos.x) * f;
            n.pos.y += (n.waypoint.y - n.pos.y) * f;
            left = 0.0;
        }
        return n.pos;
    }

    void step_all(double dt) {
        for (NodeId id = 0; id < static_cast<NodeId>(nodes_.size()); ++id)
            step_random_waypoint(id, dt);
    }

    // All other nodes within `range` of `id` at the current positions.
    std::vector<NodeId> neighbors(NodeId id, RadioRange range) const {
        const Position p = state(id).pos;
        std::vector<NodeId> out;
        for (NodeId other = 0; other < static_cast<NodeId>(nodes_.size()); ++other) {
            if (other == id) continue;
            if (in_range(p, nodes_[static_cast<std::size_t>(other)].pos, range))
                out.push_back(other);
        }
        return out;
    }

    double width() const { return width_; }
    double height() const { return height_; }

  private:
    struct NodeState {
        Position pos;
        Position waypoint;
        double speed = 0.0;      // 0 means no active leg
        double pause_left = 0.0; // seconds of pause remaining at the waypoint
        RngStream rng;
    };

    NodeState& state(NodeId id) {
        if (id < 0 || static_cast<std::size_t>(id) >= nodes_.size())
            throw std::out_of_range("unknown node id " + std::to_string(id));
        return nodes_[static_cast<std::size_t>(id)];
    }
    const NodeState& state(NodeId id) const {
        return const_cast<MobilityWorld*>(this)->state(id);
    }

    void check_inside(Position p) const {
        if (p.x < 0 || p.x > width_ || p.y < 0 || p.y > height_)
            throw std::out_of_range("position (" + std::to_string(p.x) + "," +
                                    std::to_string(p.y) + ") outside simulated area");
    }

    void draw_leg(NodeState& n) {
        n.waypoint.x = n.rng.uniform(0.0, width_);
        n.waypoint.y = n.rng.uniform(0.0, height_);
        // speed uniform in (0, max_speed]
        n.speed = params_.max_speed * (1.0 - n.rng.next_double());
        if (n.speed <= 0.0) n.speed = params_.max_speed;
    }

    double width_;
    double height_;
    MobilityParams params_;
    std::vector<NodeState> nodes_;
};

} // namespace manetsim
