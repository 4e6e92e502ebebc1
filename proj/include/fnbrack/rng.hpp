#pragma once

// xoshiro256** with splitmix64 seeding. Deterministic and portable:
// identical streams on every platform for a given seed, which the
// scenario runner relies on for reproducible reports. Sub-streams are
// derived by hashing a label into the seed (split()).

#include <cstdint>
#include <string_view>

namespace fnbrack {

inline std::uint64_t splitmix64(std::uint64_t& state)
{
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

class Rng {
public:
    explicit Rng(std::uint64_t seed = 0)
    {
        std::uint64_t sm = seed;
        for (auto& w : s_) w = splitmix64(sm);
    }

    std::uint64_t next()
    {
        auto rotl = [](std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); };
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // uniform in [0, 1)
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // uniform integer in [0, n)
    std::uint64_t below(std::uint64_t n) { return next() % n; }

    // Independent sub-stream for a named task.
    Rng split(std::string_view label) const
    {
        Rng r;
        std::uint64_t sm = s_[0] ^ fnv1a64(label);
        for (auto& w : r.s_) w = splitmix64(sm);
        return r;
    }

private:
    std::uint64_t s_[4]{};
};

}  // namespace fnbrack
