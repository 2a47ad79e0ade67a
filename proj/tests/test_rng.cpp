#include "manetsim/rng.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <vector>

using namespace manetsim;

TEST_CASE("same seed gives the same draw sequence") {
    Rng a(42), b(42);
    RngStream sa = a.stream("mobility", 3), sb = b.stream("mobility", 3);
    for (int i = 0; i < 100; ++i) CHECK(sa.next_u64() == sb.next_u64());
}

TEST_CASE("different labels give independent streams") {
    Rng rng(7);
    RngStream a = rng.stream("mobility", 0);
    RngStream b = rng.stream("traffic", 0);
    bool all_equal = true;
    RngStream a2 = rng.stream("mobility", 0);
    for (int i = 0; i < 20; ++i) {
        std::uint64_t va = a.next_u64();
        if (va != b.next_u64()) all_equal = false;
        CHECK(va == a2.next_u64()); // re-derived stream replays identically
    }
    CHECK_FALSE(all_equal);
}

TEST_CASE("consuming one stream never perturbs another") {
    Rng rng(99);
    RngStream probe_before = rng.stream("mobility", 5);
    std::vector<std::uint64_t> expect;
    for (int i = 0; i < 10; ++i) expect.push_back(probe_before.next_u64());

    RngStream noisy = rng.stream("selfish", 0);
    for (int i = 0; i < 1000; ++i) noisy.next_u64();

    RngStream probe_after = rng.stream("mobility", 5);
    for (int i = 0; i < 10; ++i) CHECK(probe_after.next_u64() == expect[static_cast<std::size_t>(i)]);
}

TEST_CASE("uniform stays inside its bounds") {
    Rng rng(1);
    RngStream s = rng.stream("test");
    for (int i = 0; i < 1000; ++i) {
        double d = s.next_double();
        CHECK(d >= 0.0);
        CHECK(d < 1.0);
        double u = s.uniform(3.0, 8.0);
        CHECK(u >= 3.0);
        CHECK(u < 8.0);
    }
}
