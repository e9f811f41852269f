#pragma once

// Counter-based uniform RNG (SplitMix64 finalizer over a keyed counter).
// Every draw is a pure function of (seed, stream, counter), so a chain can
// resume from any iteration without replaying or serializing generator state.

#include <cstdint>

namespace co2flex {

class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream)
        : seed_(seed), stream_(stream) {}

    /// Uniform double in [0, 1) for the given counter position.
    double uniform_at(std::uint64_t counter) const {
        std::uint64_t z = mix(seed_ ^ rotl(stream_, 17) ^ (counter * 0x9E3779B97f4A7C15ULL));
        return static_cast<double>(z >> 11) * 0x1.0p-53;
    }

    /// Stateful convenience: draws advance an internal counter.
    double uniform() { return uniform_at(counter_++); }

    void seek(std::uint64_t counter) { counter_ = counter; }
    std::uint64_t counter() const { return counter_; }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }
    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9E3779B97f4A7C15ULL;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t counter_ = 0;
};

}  // namespace co2flex
