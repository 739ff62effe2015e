#include <gspine/rng.hpp>

#include "catch_amalgamated.hpp"

#include <cmath>
#include <set>
#include <vector>

using namespace gspine;

TEST_CASE("mixer matches the published SplitMix64 sequence for seed 0")
{
    constexpr std::uint64_t gamma = 0x9e3779b97f4a7c15ULL;
    CHECK(splitmix_mix(gamma) == 0xe220a8397b1dcdafULL);
    CHECK(splitmix_mix(2 * gamma) == 0x6e789e6aa1b965f4ULL);
    CHECK(splitmix_mix(3 * gamma) == 0x06c45d188009454fULL);
}

TEST_CASE("pinned outputs for (seed, stream)")
{
    // Reference values computed outside C++ from the documented key derivation.
    CounterRng a(42, 0);
    CHECK(a() == 0x9eb36987f365be28ULL);
    CHECK(a() == 0xdeb3dc96d96e0d2eULL);
    CHECK(a() == 0x0eafc4825a18080bULL);
    CounterRng b(7, 3);
    CHECK(b() == 0x99ceaea4b0269e09ULL);
    CHECK(b() == 0x4b1b651f48984ec3ULL);
    CHECK(b.draws() == 2);
}

TEST_CASE("streams are reproducible and distinct")
{
    CounterRng x(5, 1), y(5, 1), z(5, 2), w(6, 1);
    std::set<std::uint64_t> firsts;
    for (int i = 0; i < 100; ++i) {
        const auto v = x();
        CHECK(v == y());
        firsts.insert(v);
    }
    CHECK(firsts.size() == 100);
    CHECK(CounterRng(5, 1)() != z());
    CHECK(CounterRng(5, 1)() != w());

    const CounterRng parent(9, 0);
    CHECK(parent.split(1)() == parent.split(1)());
    CHECK(parent.split(1)() != parent.split(2)());
    CHECK(parent.draws() == 0);
}

TEST_CASE("uniform, below and normal have the right ranges and moments")
{
    CounterRng rng(123, 0);
    double mean = 0.0, sq = 0.0;
    const int n = 200000;
    std::vector<int> buckets(7, 0);
    for (int i = 0; i < n; ++i) {
        const double u = rng.uniform();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        const auto k = rng.below(7);
        REQUIRE(k < 7);
        ++buckets[k];
        const double g = rng.normal();
        mean += g;
        sq += g * g;
    }
    mean /= n;
    sq /= n;
    CHECK(std::abs(mean) < 0.01);
    CHECK(std::abs(sq - 1.0) < 0.02);
    for (int c : buckets) CHECK(std::abs(c - n / 7.0) < 5 * std::sqrt(n / 7.0));
}
