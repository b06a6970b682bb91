#pragma once

#include <cstdint>
#include <random>

namespace cassl {

/// Deterministic random source. Wraps std::mt19937_64 (whose output stream is
/// pinned by the standard) and implements its own draw helpers so results do
/// not depend on the standard library's distribution implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : seed_(seed), gen_(seed) {}

    std::uint64_t seed() const { return seed_; }

    std::uint64_t next_u64() { return gen_(); }

    /// Uniform double in [0, 1) with 53-bit resolution.
    double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, n). n must be positive.
    std::size_t uniform_int(std::size_t n) {
        return static_cast<std::size_t>(uniform01() * static_cast<double>(n)) % n;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    bool bernoulli(double p) { return uniform01() < p; }

    /// Derives an independent substream keyed by `salt` (splitmix64 mixing of
    /// the original seed). Used for per-trial streams that must not depend on
    /// how many draws the parent has made.
    Rng derive(std::uint64_t salt) const { return Rng(mix(seed_ ^ (salt * 0x9e3779b97f4a7c15ULL))); }

    static std::uint64_t mix(std::uint64_t x) {
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

private:
    std::uint64_t seed_;
    std::mt19937_64 gen_;
};

}  // namespace cassl
