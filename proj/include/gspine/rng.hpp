#pragma once

// Counter-based random streams.
//
// Every draw is a pure function of (key, counter): the key is derived from
// the user seed and a stream index, the counter advances by one per 64-bit
// output.  The mixing function is the SplitMix64 finalizer, so the sequence
// is bit-identical on every platform with IEEE doubles.  Normal deviates use
// the Box-Muller transform instead of <random> distributions, whose output
// is implementation-defined.

#include <cmath>
#include <cstdint>
#include <numbers>

namespace gspine {

constexpr std::uint64_t splitmix_mix(std::uint64_t z) noexcept
{
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Stream key for worker/experiment `stream` under a user seed.
constexpr std::uint64_t derive_stream_key(std::uint64_t seed, std::uint64_t stream) noexcept
{
    return splitmix_mix(splitmix_mix(seed ^ 0x6a09e667f3bcc909ULL) + 0x9e3779b97f4a7c15ULL * (stream + 1));
}

class CounterRng {
public:
    using result_type = std::uint64_t;

    explicit CounterRng(std::uint64_t seed = 0, std::uint64_t stream = 0) noexcept
        : key_(derive_stream_key(seed, stream))
    {
    }

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return ~result_type{0}; }

    result_type operator()() noexcept
    {
        return splitmix_mix(key_ + 0x9e3779b97f4a7c15ULL * ++counter_);
    }

    /// Independent child stream; the parent is not advanced.
    CounterRng split(std::uint64_t stream) const noexcept
    {
        CounterRng child;
        child.key_ = splitmix_mix(key_ ^ derive_stream_key(stream, counter_));
        return child;
    }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, bound).
    std::uint64_t below(std::uint64_t bound) noexcept
    {
        // Lemire's multiply-shift; bias is < 2^-64 * bound, irrelevant here.
        __extension__ using wide = unsigned __int128;
        return static_cast<std::uint64_t>((static_cast<wide>((*this)()) * bound) >> 64);
    }

    double normal() noexcept
    {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

    std::uint64_t draws() const noexcept { return counter_; }

private:
    std::uint64_t key_ = 0;
    std::uint64_t counter_ = 0;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace gspine
