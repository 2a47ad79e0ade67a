#pragma once

#include <cstdint>
#include <string_view>

namespace manetsim {

// splitmix64: small, fast, and identical on every platform. std::mt19937
// would be portable too, but the standard distributions are not, and trace
// determinism across toolchains matters more than statistical quality here.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x00000100000001b3ull;
    }
    return h;
}

// One independent draw sequence. Streams derived from the same master seed
// but different labels never interleave, so adding a consumer module cannot
// perturb another module's draws.
class RngStream {
  public:
    RngStream() = default;
    explicit RngStream(std::uint64_t seed) : state_(seed) {
        // a few warm-up rounds decorrelate near-equal seeds
        splitmix64(state_);
        splitmix64(state_);
    }

    std::uint64_t next_u64() { return splitmix64(state_); }

    // uniform in [0, 1)
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // uniform in [lo, hi)
    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    // uniform integer in [0, n)
    std::uint64_t uniform_int(std::uint64_t n) { return n == 0 ? 0 : next_u64() % n; }

  private:
    std::uint64_t state_ = 0;
};

// Master seed holder handing out labeled substreams.
class Rng {
  public:
    explicit Rng(std::uint64_t master_seed) : master_(master_seed) {}

    std::uint64_t seed() const { return master_; }

    RngStream stream(std::string_view label) const {
        return RngStream{master_ ^ fnv1a64(label)};
    }

    RngStream stream(std::string_view label, std::uint64_t index) const {
        std::uint64_t mix = master_ ^ fnv1a64(label);
        mix ^= 0x9e3779b97f4a7c15ull * (index + 1);
        return RngStream{mix};
    }

  private:
    std::uint64_t master_;
};

} // namespace manetsim
