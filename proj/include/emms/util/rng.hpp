#pragma once

#include <cstdint>
#include <random>

namespace emms {

// splitmix64; used to derive independent per-index seeds from a master seed
// so parallel and serial dataset generation draw identical streams.
inline std::uint64_t mix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::mt19937_64 substream(std::uint64_t seed, std::uint64_t index)
{
    return std::mt19937_64(mix64(seed ^ mix64(index)));
}

} // namespace emms
