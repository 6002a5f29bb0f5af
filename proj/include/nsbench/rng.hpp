#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <string_view>
#include <vector>

namespace nsbench {

// Engine for one independent random stream identified by (seed, stream).
// std::seed_seq's mixing is fixed by the standard, so the streams are the same
// on every conforming platform.
inline std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    return std::mt19937_64(seq);
}

// Stable 64-bit id for a label, used to derive per-stratum streams.
inline std::uint64_t label_stream_id(std::string_view label) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : label) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

// Uniform integer in [0, n). Rejection sampling on the raw engine output keeps
// the result independent of the standard library's distribution code.
inline std::uint64_t uniform_index(std::mt19937_64& engine, std::uint64_t n) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t x;
    do {
        x = engine();
    } while (x >= limit);
    return x % n;
}

inline double uniform_unit(std::mt19937_64& engine) {
    return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

template <class T>
void shuffle_in_place(std::vector<T>& items, std::mt19937_64& engine) {
    for (std::size_t i = items.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(uniform_index(engine, i));
        std::swap(items[i - 1], items[j]);
    }
}

} // namespace nsbench
