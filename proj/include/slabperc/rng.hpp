#pragma once

#include <cstdint>

namespace slabperc {

/// splitmix64 finalizer; the workhorse of the counter-based seeding scheme.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Uniform in [0,1) from a 64-bit hash. Bit-stable across platforms.
inline double to_unit(std::uint64_t h) { return static_cast<double>(h >> 11) * 0x1.0p-53; }

/// The per-edge uniform variable: a pure function of (master seed, stream,
/// edge identity). Parallel workers never share generator state.
inline double edge_uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t edge_identity) {
    return to_unit(mix64(mix64(seed ^ mix64(stream)) ^ edge_identity));
}

/// Small counter-based generator for auxiliary randomness (bootstrap draws,
/// test fixtures). Deterministic for a given (seed, tag).
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t tag) : key_(mix64(seed ^ mix64(tag))) {}
    std::uint64_t next_u64() { return mix64(key_ ^ counter_++); }
    double next_unit() { return to_unit(next_u64()); }
    /// Uniform integer in [0, n).
    std::uint64_t next_below(std::uint64_t n) { return next_u64() % n; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace slabperc
