#pragma once

#include <cstdint>

namespace rencontre::kernels {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

inline std::uint64_t rotl64(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
}

/// xoshiro256++ with one independent stream per simulation replication.
/// The stream is a pure function of (master seed, replication index), so
/// results do not depend on thread scheduling or SIMD lane placement.
struct Xoshiro256pp {
    std::uint64_t s[4];

    Xoshiro256pp(std::uint64_t master_seed, std::uint64_t replication) {
        std::uint64_t sm = master_seed + 0x9E3779B97F4A7C15ull * (replication + 1);
        for (auto& w : s)
            w = splitmix64(sm);
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl64(s[0] + s[3], 23) + s[0];
        const std::uint64_t t = s[1] << 17;
        s[2] ^= s[0];
        s[3] ^= s[1];
        s[1] ^= s[2];
        s[0] ^= s[3];
        s[2] ^= t;
        s[3] = rotl64(s[3], 45);
        return result;
    }
};

} // namespace rencontre::kernels
