#pragma once

#include <compare>
#include <cstdint>
#include <cstdio>
#include <string>

namespace manetsim {

// Simulation clock value. Stored as integer microseconds so a 100 s run
// accumulates no floating-point drift and trace timestamps are bit-exact.
class SimTime {
  public:
    constexpr SimTime() = default;

    static constexpr SimTime from_micros(std::int64_t us) { return SimTime{us}; }

    static constexpr SimTime from_seconds(double s) {
        // round-to-nearest keeps 0.1-style literals exact
        return SimTime{static_cast<std::int64_t>(s * 1e6 + (s >= 0 ? 0.5 : -0.5))};
    }

    constexpr std::int64_t micros() const { return us_; }
    constexpr double seconds() const { return static_cast<double>(us_) / 1e6; }

    constexpr auto operator<=>(const SimTime&) const = default;

    constexpr SimTime operator+(SimTime o) const { return SimTime{us_ + o.us_}; }
    constexpr SimTime operator-(SimTime o) const { return SimTime{us_ - o.us_}; }
    SimTime& operator+=(SimTime o) {
        us_ += o.us_;
        return *this;
    }

    // Fixed six-decimal rendering used by the trace format.
    std::string to_string() const {
        char buf[32];
        std::int64_t whole = us_ / 1000000;
        std::int64_t frac = us_ % 1000000;
        std::snprintf(buf, sizeof(buf), "%lld.%06lld", static_cast<long long>(whole),
                      static_cast<long long>(frac));
        return buf;
    }

  private:
    constexpr explicit SimTime(std::int64_t us) : us_(us) {}
    std::int64_t us_ = 0;
};

inline namespace literals {
constexpr SimTime operator""_s(long double s) { return SimTime::from_seconds(static_cast<double>(s)); }
constexpr SimTime operator""_s(unsigned long long s) {
    return SimTime::from_micros(static_cast<std::int64_t>(s) * 1000000);
}
} // namespace literals

} // namespace manetsim
