#pragma once

#include <bit>
#include <cstdint>
#include <string_view>

namespace neaiaas {

// Small deterministic hashing helpers. Used for profile digests and for
// deriving independent per-cell RNG streams; nothing here is
// cryptographic.

constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t hash_mix(std::uint64_t a, std::uint64_t b) {
    return splitmix64(a ^ splitmix64(b));
}

// FNV-1a over the bytes of a string.
constexpr std::uint64_t hash_str(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::uint64_t double_bits(double d) {
    // Normalize -0.0 so equal grid values always hash alike.
    if (d == 0.0) d = 0.0;
    return std::bit_cast<std::uint64_t>(d);
}

// Seed for one experiment cell. Depends only on (master seed, experiment
// tag, grid value), so editing the grid does not perturb surviving cells
// and cells can run in any order or thread.
inline std::uint64_t cell_seed(std::uint64_t master, std::string_view experiment,
                               double grid_value) {
    return hash_mix(hash_mix(master, hash_str(experiment)), double_bits(grid_value));
}

}  // namespace neaiaas
