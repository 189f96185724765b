#pragma once

#include <cstdint>
#include <random>

namespace lasmud {

/// SplitMix64 finalizer; used to turn (seed, stream) pairs into well-mixed
/// engine seeds so that parallel trials draw from decorrelated streams.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Deterministic per-stream engine: identical (seed, stream) always yields
/// the identical draw sequence, independent of which thread runs it.
inline std::mt19937_64 stream_engine(std::uint64_t seed, std::uint64_t stream) {
    return std::mt19937_64(mix64(mix64(seed) ^ mix64(stream + 0x5851f42d4c957f2dULL)));
}

/// Sub-stream of a stream (e.g. per-detector randomness inside one trial).
inline std::mt19937_64 stream_engine(std::uint64_t seed, std::uint64_t stream,
                                     std::uint64_t substream) {
    return std::mt19937_64(
        mix64(mix64(seed) ^ mix64(stream + 0x5851f42d4c957f2dULL) ^
              mix64(substream + 0x14057b7ef767814fULL)));
}

}  // namespace lasmud
