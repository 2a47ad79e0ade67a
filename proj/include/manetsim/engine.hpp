#pragma once

#include "manetsim/sim_time.hpp"

#include <cstdint>
#include <functional>
#include <queue>
#include <stdexcept>
#include <unordered_set>
#include <vector>

namespace manetsim {

class SimError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

using EventHandle = std::uint64_t;

// Deterministic discrete-event engine. Events fire in (time, insertion seq)
// order; same-time events execute in the order they were scheduled.
class SimEngine {
  public:
    SimTime now() const { return now_; }

    EventHandle schedule(SimTime at, std::function<void()> action) {
        if (at < now_) {
            throw SimError("schedule: event time " + at.to_string() +
                           " is in the past (now=" + now_.to_string() + ")");
        }
        EventHandle h = next_seq_++;
        queue_.push(Event{at, h, std::move(action)});
        return h;
    }

    // Canceled events are skipped (and not counted) when they reach the head.
    void cancel(EventHandle h) { canceled_.insert(h); }

    // Executes every pending event with fire time <= t_end, then advances the
    // clock to exactly t_end. Returns the number of actions executed.
    std::uint64_t run_until(SimTime t_end) {
        if (t_end < now_) {
            throw SimError("run_until: target " + t_end.to_string() + " is in the past");
        }
        std::uint64_t executed = 0;
        while (!queue_.empty() && queue_.top().at <= t_end) {
            Event ev = queue_.top();
            queue_.pop();
            if (auto it = canceled_.find(ev.seq); it != canceled_.end()) {
                canceled_.erase(it);
                continue;
            }
            now_ = ev.at;
            ev.action();
            ++executed;
        }
        now_ = t_end;
        return executed;
    }

    std::size_t pending() const { return queue_.size(); }

  private:
    struct Event {
        SimTime at;
        EventHandle seq;
        std::function<void()> action;
    };
    struct Later {
        bool operator()(const Event& a, const Event& b) const {
            if (a.at != b.at) return b.at < a.at;
            return b.seq < a.seq;
        }
    };

    SimTime now_{};
    EventHandle next_seq_ = 0;
    std::priority_queue<Event, std::vector<Event>, Later> queue_;
    std::unordered_set<EventHandle> canceled_;
};

} // namespace manetsim
