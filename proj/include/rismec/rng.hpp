#pragma once

#include <cstdint>
#include <random>

namespace rismec {

/// Deterministic 64-bit mixer (splitmix64 finalizer). Used to derive
/// independent substreams from (seed, slot, purpose) so that channel
/// generation stays a pure function of the scenario seed and slot index.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Stream tags keep substreams non-overlapping per purpose.
enum class StreamTag : std::uint64_t {
    channel_uplink = 0x11,
    channel_downlink = 0x22,
    csi_noise = 0x33,
    arrivals = 0x44,
};

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t slot, StreamTag tag) {
    return mix64(mix64(base ^ mix64(slot)) ^ static_cast<std::uint64_t>(tag));
}

inline std::mt19937_64 make_engine(std::uint64_t base, std::uint64_t slot, StreamTag tag) {
    return std::mt19937_64(derive_seed(base, slot, tag));
}

} // namespace rismec
