#pragma once

#include <cstdint>
#include <random>

namespace opdyn {

using Rng = std::mt19937_64;

/// splitmix64 finalizer; the fixed mixing function for derived seeds.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed of task `index` under root seed `root`. Every sample, center or
/// worker task draws from its own stream, so results do not depend on how
/// tasks are scheduled across threads.
constexpr std::uint64_t derive_seed(std::uint64_t root, std::uint64_t index) noexcept
{
    return mix64(mix64(root) ^ mix64(index + 0x632be59bd9b4e019ULL));
}

inline Rng make_rng(std::uint64_t root, std::uint64_t index)
{
    return Rng(derive_seed(root, index));
}

inline bool coin(Rng& rng) { return (rng() >> 63) != 0; }

inline std::uint64_t uniform_below(Rng& rng, std::uint64_t n)
{
    return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(rng);
}

} // namespace opdyn
