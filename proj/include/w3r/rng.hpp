#pragma once

#include <cstdint>
#include <limits>

namespace w3r {

//! SplitMix64 finalizer; used both as a generator step and to derive
//! independent stream seeds from (seed, domain, index) tuples.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t streamSeed(std::uint64_t seed, std::uint64_t domain,
                                   std::uint64_t index, std::uint64_t sub = 0) {
    return mix64(mix64(mix64(seed ^ mix64(domain)) + index) + sub);
}

//! Stream domains, so that walks, circle segments, gossip rounds etc. never
//! share random numbers even when they share a seed.
namespace rng_domain {
inline constexpr std::uint64_t kSalsaWalk = 0x5a15a;
inline constexpr std::uint64_t kCircleSegment = 0xc17c1e;
inline constexpr std::uint64_t kGossip = 0x6055;
inline constexpr std::uint64_t kAttack = 0xa77ac;
inline constexpr std::uint64_t kExperiment = 0xe49;
inline constexpr std::uint64_t kSynthetic = 0x5947;
} // namespace rng_domain

//! Small seedable generator satisfying UniformRandomBitGenerator. One
//! instance per walk / segment / round gives scheduling-independent results.
class Rng {
public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed) : state_(seed) {}
    Rng(std::uint64_t seed, std::uint64_t domain, std::uint64_t index, std::uint64_t sub = 0)
        : state_(streamSeed(seed, domain, index, sub)) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    //! Uniform in [0, 1), 53 bits.
    double uniform01() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    //! Uniform in (0, 1].
    double uniformOpen01() { return 1.0 - uniform01(); }

    //! Uniform integer in [0, n); n > 0.
    std::uint64_t below(std::uint64_t n) {
        // Lemire's multiply-shift with rejection.
        unsigned __int128 m = static_cast<unsigned __int128>((*this)()) * n;
        auto low = static_cast<std::uint64_t>(m);
        if (low < n) {
            const std::uint64_t threshold = (0 - n) % n;
            while (low < threshold) {
                m = static_cast<unsigned __int128>((*this)()) * n;
                low = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

private:
    std::uint64_t state_;
};

} // namespace w3r
