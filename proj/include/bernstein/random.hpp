#pragma once

#include <cstdint>
#include <random>

namespace bernstein {

using RandomStream = std::mt19937_64;

/// SplitMix64 finalizer; derives sub-seeds (one per grid row, say) from a run seed.
inline std::uint64_t mix_seed(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Independent stream for one path, a pure function of (seed, path_index), so
/// results do not depend on how paths are scheduled across workers.
inline RandomStream make_stream(std::uint64_t seed, std::uint64_t path_index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(path_index), static_cast<std::uint32_t>(path_index >> 32),
                      0x62657273u};
    return RandomStream(seq);
}

}  // namespace bernstein
