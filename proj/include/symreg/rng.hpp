#pragma once

#include <cstdint>
#include <random>

namespace symreg {

// splitmix64; used to derive independent child streams from (seed, key)
// pairs so that parallel work (samples, MC passes, sweep cells) stays
// reproducible regardless of scheduling.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t key) {
    return mix64(seed ^ mix64(key));
}

inline std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t k0, std::uint64_t k1) {
    return derive_stream(derive_stream(seed, k0), k1);
}

inline std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t key = 0) {
    return std::mt19937_64(derive_stream(seed, key));
}

inline std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t k0, std::uint64_t k1) {
    return std::mt19937_64(derive_stream(seed, k0, k1));
}

}  // namespace symreg
