#include <doctest.h>

#include <cmath>
#include <set>

#include "tse/rng.hpp"

using namespace tse::rng;

TEST_CASE("derive_stream is deterministic and separates salts and indices") {
    const std::uint64_t a = derive_stream(1, salt_of("price_u"), 0);
    CHECK(a == derive_stream(1, salt_of("price_u"), 0));
    CHECK(a != derive_stream(1, salt_of("price_u"), 1));
    CHECK(a != derive_stream(1, salt_of("price_deriv"), 0));
    CHECK(a != derive_stream(2, salt_of("price_u"), 0));

    std::set<std::uint64_t> seen;
    for (std::uint64_t i = 0; i < 1000; ++i)
        seen.insert(derive_stream(17, salt_of("price_u"), i));
    CHECK(seen.size() == 1000);
}

TEST_CASE("xoshiro sequences repeat per seed and land in the unit interval") {
    Xoshiro256pp g1(42), g2(42), g3(43);
    bool all_equal = true, any_diff = false;
    for (int i = 0; i < 64; ++i) {
        const std::uint64_t v = g1.next_u64();
        all_equal = all_equal && (v == g2.next_u64());
        any_diff = any_diff || (v != g3.next_u64());
    }
    CHECK(all_equal);
    CHECK(any_diff);

    Xoshiro256pp g(7);
    double mean = 0.0;
    bool in_range = true;
    for (int i = 0; i < 100000; ++i) {
        const double u = g.next_unit_open();
        in_range = in_range && u > 0.0 && u <= 1.0;
        mean += u;
    }
    CHECK(in_range);
    CHECK(std::abs(mean / 100000 - 0.5) < 0.005);
}

TEST_CASE("normal sampler has the right first two moments") {
    NormalSampler n(11);
    double mean = 0.0, sq = 0.0;
    const int count = 200000;
    for (int i = 0; i < count; ++i) {
        const double z = n.next();
        mean += z;
        sq += z * z;
    }
    mean /= count;
    sq /= count;
    CHECK(std::abs(mean) < 0.01);
    CHECK(std::abs(sq - 1.0) < 0.02);
}
